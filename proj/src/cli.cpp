#include "llk/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "llk/errors.hpp"
#include "llk/parallel.hpp"
#include "llk/rigidity.hpp"

namespace llk {

namespace {

using json = nlohmann::ordered_json;
const char* const kModule = "cli";

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::parse, kModule, path + ": " + msg);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "non-finite number");
  return d;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> parse_labels(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_string()) fail(p, "expected a string");
    out.push_back(v[i].get<std::string>());
    if (!seen.insert(out.back()).second) fail(p, "duplicate label \"" + out.back() + "\"");
  }
  return out;
}

// n x n matrix given as rows; `cell` converts one entry.
template <class T, class Cell>
std::vector<T> parse_matrix(const json& v, std::size_t n, const std::string& path, Cell cell) {
  if (!v.is_array()) fail(path, "expected an array of rows");
  if (v.size() != n) fail(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(v.size()));
  std::vector<T> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) fail(row, "expected an array");
    if (v[i].size() != n) {
      fail(row, "row " + std::to_string(i) + " has " + std::to_string(v[i].size()) + " entries, expected " +
                    std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) out.push_back(cell(v[i][j], row + "[" + std::to_string(j) + "]"));
  }
  return out;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_json(const std::vector<double>& m, std::size_t n) {
  json rows = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(num(m[i * n + j]));
    rows.push_back(std::move(row));
  }
  return rows;
}

WarpingSpec parse_warping(const json& w, const json* interval) {
  const std::string path = "$.warping";
  const json& kind = field(w, "kind", path);
  if (!kind.is_string()) fail(path + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  std::optional<std::pair<double, double>> iv;
  if (interval) {
    if (!interval->is_array() || interval->size() != 2) fail("$.interval", "expected [a, b]");
    const double a = (*interval)[0].is_null() ? -kInf : number((*interval)[0], "$.interval[0]");
    const double b = (*interval)[1].is_null() ? kInf : number((*interval)[1], "$.interval[1]");
    iv = std::make_pair(a, b);
  }
  WarpingSpec f;
  try {
    if (k == "cos") {
      f = WarpingSpec::cosine();
      if (iv) {
        f.a = iv->first;
        f.b = iv->second;
      }
    } else if (k == "constant") {
      const double v = number(field(w, "value", path), path + ".value");
      f = iv ? WarpingSpec::constant(v, iv->first, iv->second) : WarpingSpec::constant(v);
    } else if (k == "table") {
      f = WarpingSpec::table(numbers(field(w, "knots", path), path + ".knots"),
                             numbers(field(w, "values", path), path + ".values"), iv);
    } else {
      fail(path + ".kind", "unknown warping kind \"" + k + "\"");
    }
    f.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse) throw;
    fail(path, e.what());
  }
  return f;
}

json warping_json(const WarpingSpec& f) {
  json w;
  w["kind"] = warping_kind_name(f.kind);
  if (f.kind == WarpingSpec::Kind::constant) w["value"] = f.value;
  if (f.kind == WarpingSpec::Kind::table) {
    w["knots"] = f.knots;
    w["values"] = f.values;
  }
  return w;
}

json report_json(const ComparisonReport& r, const std::vector<std::string>& labels) {
  auto name = [&](std::size_t i) { return i < labels.size() ? json(labels[i]) : json(i); };
  json j;
  j["check"] = r.check;
  j["pass"] = r.pass;
  j["tolerance"] = num(r.tolerance);
  j["checked"] = r.checked;
  j["violation_count"] = r.violation_count;
  j["max_deficit"] = num(r.max_deficit);
  j["max_excess"] = num(r.max_excess);
  j["excess_count"] = r.excess_count;
  json notes = json::object();
  for (const auto& [k, v] : r.notes) notes[k] = num(v);
  j["notes"] = std::move(notes);
  json vs = json::array();
  for (const auto& v : r.violations) {
    vs.push_back({{"kind", v.kind}, {"i", name(v.i)}, {"j", name(v.j)}, {"lhs", num(v.lhs)}, {"rhs", num(v.rhs)},
                  {"deficit", num(v.deficit)}});
  }
  j["violations"] = std::move(vs);
  return j;
}

struct Run {
  json report;
  bool pass = true;
  void add(const ComparisonReport& r, const std::vector<std::string>& labels) {
    report["checks"].push_back(report_json(r, labels));
    pass = pass && r.pass;
  }
};

// Sampled triangles, one per item, drawn independently of the worker count.
struct SampledTriangle {
  bool found = false;
  std::string error;
  TriangleSample sample;
};

std::vector<SampledTriangle> draw_triangles(const FiniteCausalSpace& X, const CliOptions& opt) {
  std::vector<SampledTriangle> out(opt.samples);
  parallel_for(opt.samples, opt.jobs, [&](std::size_t item) {
    try {
      out[item].sample = sample_triangle(X, opt.seed, item);
      out[item].found = out[item].sample.found;
    } catch (const Error& e) {
      out[item].error = e.qualified();
    }
  });
  return out;
}

void run_curvature(Run& run, const FiniteCausalSpace& X, const CliOptions& opt) {
  const double eps = opt.tol_disc ? *opt.tol_disc : chain_budget(X);
  const auto tris = draw_triangles(X, opt);
  struct Item {
    std::optional<ComparisonReport> tri, mono;
    std::string error;
    double loss = 0.0;
  };
  std::vector<Item> items(tris.size());
  parallel_for(tris.size(), opt.jobs, [&](std::size_t k) {
    if (!tris[k].found) return;
    const Triangle& t = tris[k].sample.triangle;
    try {
      items[k].tri = check_triangle_comparison(X, t, opt.tol_exact, eps);
      items[k].loss = t.loss(X);
      items[k].mono = check_monotonicity(X, t.past, t.pm, t.pf, opt.tol_exact);
    } catch (const Error& e) {
      items[k].error = e.qualified();
    }
  });
  ComparisonReport tri, mono;
  tri.check = "triangle_comparison";
  tri.tolerance = opt.tol_exact;
  mono.check = "monotonicity";
  mono.tolerance = opt.tol_exact;
  std::size_t found = 0, violating = 0, skipped = 0, mono_failing = 0;
  double loss = 0.0;
  json errors = json::array();
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!tris[k].error.empty() || !items[k].error.empty()) {
      ++skipped;
      errors.push_back({{"item", k}, {"error", tris[k].error.empty() ? items[k].error : tris[k].error}});
      continue;
    }
    if (!tris[k].found) continue;
    ++found;
    tri.absorb(*items[k].tri);
    mono.absorb(*items[k].mono);
    if (items[k].tri->violation_count > 0) ++violating;
    if (items[k].mono->violation_count > 0) ++mono_failing;
    loss = std::max(loss, items[k].loss);
  }
  tri.note("triangles", static_cast<double>(found));
  tri.note("violating_triangles", static_cast<double>(violating));
  tri.note("violating_fraction", found ? static_cast<double>(violating) / static_cast<double>(found) : 0.0);
  tri.note("skipped", static_cast<double>(skipped));
  tri.note("not_found", static_cast<double>(items.size() - found - skipped));
  tri.note("max_chain_loss", loss);
  tri.note("chain_budget", eps);
  mono.note("triangles", static_cast<double>(found));
  mono.note("failing_triangles", static_cast<double>(mono_failing));
  tri.finish();
  mono.finish();
  if (found == 0) {
    tri.pass = false;
    tri.note("no_triangles", 1.0);
  }
  run.add(tri, X.labels);
  run.add(mono, X.labels);
  run.report["errors"] = std::move(errors);
}

void run_subdivide(Run& run, const FiniteCausalSpace& X, const CliOptions& opt) {
  const auto tris = draw_triangles(X, opt);
  struct Item {
    std::vector<ComparisonReport> reports;
    std::vector<std::string> errors;
    std::size_t skipped = 0;
  };
  std::vector<Item> items(tris.size());
  parallel_for(tris.size(), opt.jobs, [&](std::size_t k) {
    if (!tris[k].found) return;
    const Triangle& t = tris[k].sample.triangle;
    auto attempt = [&](const Chain& side, std::size_t opposite, SubdivisionKind which) {
      if (side.size() < 3) return;
      // Interior point nearest the middle of the side that sees the opposite vertex.
      std::optional<std::size_t> pick;
      for (std::size_t d = 0; d < side.size(); ++d) {
        const std::size_t lo = side.size() / 2 - std::min(d, side.size() / 2), hi = side.size() / 2 + d;
        auto sees = [&](std::size_t i) {
          return i > 0 && i + 1 < side.size() &&
                 (X.t(side.points[i], opposite) > 0.0 || X.t(opposite, side.points[i]) > 0.0);
        };
        if (sees(lo)) { pick = lo; break; }
        if (sees(hi)) { pick = hi; break; }
      }
      if (!pick) {
        ++items[k].skipped;
        return;
      }
      try {
        items[k].reports.push_back(check_subdivision(X, t, side.points[*pick], which, opt.tol_exact));
      } catch (const Error& e) {
        items[k].errors.push_back(e.what());
      }
    };
    attempt(t.pf, t.middle, SubdivisionKind::across);
    if (t.pm.size() >= 3) attempt(t.pm, t.future, SubdivisionKind::future);
    else attempt(t.mf, t.past, SubdivisionKind::future);
  });
  ComparisonReport across, future;
  across.check = "subdivision_across";
  future.check = "subdivision_future";
  across.tolerance = future.tolerance = opt.tol_exact;
  std::size_t counts[2][3] = {{0, 0, 0}, {0, 0, 0}};  // convex, concave, degenerate
  std::size_t skipped = 0;
  json errors = json::array();
  for (std::size_t k = 0; k < items.size(); ++k) {
    skipped += items[k].skipped;
    if (!tris[k].error.empty()) errors.push_back({{"item", k}, {"error", tris[k].error}});
    for (const auto& e : items[k].errors) errors.push_back({{"item", k}, {"error", e}});
    for (const auto& r : items[k].reports) {
      const int w = r.check == "subdivision_across" ? 0 : 1;
      (w == 0 ? across : future).absorb(r);
      const bool cx = r.note_value("convex") > 0.5, cc = r.note_value("concave") > 0.5;
      ++counts[w][cx && cc ? 2 : cx ? 0 : 1];
    }
  }
  for (int w = 0; w < 2; ++w) {
    ComparisonReport& r = w == 0 ? across : future;
    r.note("convex", static_cast<double>(counts[w][0]));
    r.note("concave", static_cast<double>(counts[w][1]));
    r.note("degenerate", static_cast<double>(counts[w][2]));
    r.finish();
    run.add(r, X.labels);
  }
  run.report["skipped_null_sides"] = skipped;
  run.report["errors"] = std::move(errors);
}

void run_split(Run& run, const SpaceFile& f, const FiniteCausalSpace& X, const CliOptions& opt) {
  const LineSample gamma = find_line(X);
  RigidityOptions ro;
  ro.tol_exact = opt.tol_exact;
  ro.tol_disc = opt.tol_disc ? *opt.tol_disc : -1.0;
  ro.jobs = opt.jobs;
  ro.allow_unsettled = opt.allow_unsettled;
  const SplittingResult s = build_splitting(X, gamma, ro);
  const FiniteMetricSpace& S = s.slice.metric;

  json line;
  json pts = json::array();
  for (std::size_t p : gamma.chain.points) pts.push_back(X.labels[p]);
  line["points"] = std::move(pts);
  line["margin"] = num(gamma.margin);
  line["epsilon"] = num(gamma.epsilon);
  line["step"] = num(gamma.step());
  run.report["line"] = std::move(line);

  json slice;
  slice["labels"] = S.labels;
  slice["dist"] = matrix_json(S.dist, S.size());
  json members = json::array();
  for (const auto& sp : s.slice.points) members.push_back(sp.members.size());
  slice["members"] = std::move(members);
  slice["tol_identity"] = num(s.slice.tol_identity);
  if (opt.allow_unsettled) slice["unsettled"] = s.slice.unsettled;
  run.report["slice"] = std::move(slice);

  json sp;
  sp["tolerance"] = num(s.tolerance);
  sp["samples"] = s.samples.size();
  sp["pairs"] = s.pairs;
  sp["residual"] = num(s.residual);
  sp["residual_pair"] = {X.labels[s.residual_i], X.labels[s.residual_j]};
  sp["mismatches"] = s.mismatches;
  json mm = json::array();
  for (const auto& [a, b] : s.mismatch_list) mm.push_back({X.labels[a], X.labels[b]});
  sp["mismatch_pairs"] = std::move(mm);
  sp["pass"] = s.pass;
  run.report["splitting"] = std::move(sp);
  run.pass = run.pass && s.pass;

  // Against the generating base, when there is one.
  if (f.kind == SpaceFile::Kind::suspension_request && !X.coords.empty()) {
    const FiniteMetricSpace& B = f.request.base;
    std::vector<std::size_t> base_of;
    for (const auto& p : s.slice.points) base_of.push_back(static_cast<std::size_t>(X.coords[p.members.front()][1]));
    double worst = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) {
      for (std::size_t j = 0; j < S.size(); ++j) worst = std::max(worst, std::abs(S.d(i, j) - B.d(base_of[i], base_of[j])));
    }
    const bool ok = worst <= s.tolerance && S.size() == B.size();
    run.report["base_recovery"] = {{"base_points", B.size()}, {"slice_points", S.size()}, {"max_error", num(worst)},
                                   {"pass", ok}};
    run.pass = run.pass && ok;
  }
  run.add(s.slice.metric_report, S.labels);
  run.add(check_slice_alexandrov(S, opt.tol_exact), S.labels);
}

json base_header(const std::string& command, const std::string& input, const CliOptions& opt) {
  json h;
  h["tool"] = "llk";
  h["version"] = kToolVersion;
  h["command"] = command;
  h["input_sha256"] = sha256_hex(input);
  json o;
  o["tol_exact"] = opt.tol_exact;
  o["tol_disc"] = opt.tol_disc ? json(*opt.tol_disc) : json(nullptr);
  o["samples"] = opt.samples;
  o["seed"] = opt.seed;
  o["grid"] = opt.grid ? json(*opt.grid) : json(nullptr);
  h["options"] = std::move(o);
  return h;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

SpaceFile parse_space_file(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    fail("$", std::string("invalid JSON (") + e.what() + ")");
  }
  const json& kind = field(doc, "kind", "$");
  if (!kind.is_string()) fail("$.kind", "expected a string");
  const std::string k = kind.get<std::string>();
  SpaceFile f;
  if (k == "finite_causal") {
    f.kind = SpaceFile::Kind::finite_causal;
    FiniteCausalSpace& X = f.space;
    X.labels = parse_labels(field(doc, "labels", "$"), "$.labels");
    const std::size_t n = X.labels.size();
    X.tau = parse_matrix<double>(field(doc, "tau", "$"), n, "$.tau", [](const json& v, const std::string& p) {
      return v.is_null() ? kInf : number(v, p);
    });
    X.leq = parse_matrix<std::uint8_t>(field(doc, "leq", "$"), n, "$.leq", [](const json& v, const std::string& p) {
      if (v.is_boolean()) return static_cast<std::uint8_t>(v.get<bool>());
      if (v.is_number_integer() && (v.get<long long>() == 0 || v.get<long long>() == 1)) {
        return static_cast<std::uint8_t>(v.get<long long>());
      }
      fail(p, "expected 0 or 1");
    });
    if (auto it = doc.find("coords"); it != doc.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != n) fail("$.coords", "expected " + std::to_string(n) + " rows");
      for (std::size_t i = 0; i < n; ++i) {
        const std::string p = "$.coords[" + std::to_string(i) + "]";
        X.coords.push_back(numbers((*it)[i], p));
        if (X.coords.back().empty()) fail(p, "empty coordinate row");
      }
    }
  } else if (k == "suspension_request") {
    f.kind = SpaceFile::Kind::suspension_request;
    SuspensionRequest& r = f.request;
    auto iv = doc.find("interval");
    r.explicit_interval = iv != doc.end() && !iv->is_null();
    r.warping = parse_warping(field(doc, "warping", "$"), r.explicit_interval ? &*iv : nullptr);
    const json& base = field(doc, "base", "$");
    r.base.labels = parse_labels(field(base, "labels", "$.base"), "$.base.labels");
    r.base.dist = parse_matrix<double>(field(base, "dist", "$.base"), r.base.size(), "$.base.dist",
                                       [](const json& v, const std::string& p) { return number(v, p); });
    r.t_grid = numbers(field(doc, "t_grid", "$"), "$.t_grid");
    if (r.t_grid.empty()) fail("$.t_grid", "empty time grid");
  } else {
    fail("$.kind", "unknown kind \"" + k + "\"");
  }
  return f;
}

std::string serialize_space_file(const SpaceFile& f) {
  json doc;
  if (f.kind == SpaceFile::Kind::finite_causal) {
    const FiniteCausalSpace& X = f.space;
    const std::size_t n = X.size();
    doc["kind"] = "finite_causal";
    doc["labels"] = X.labels;
    doc["tau"] = matrix_json(X.tau, n);
    json leq = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < n; ++j) row.push_back(X.le(i, j) ? 1 : 0);
      leq.push_back(std::move(row));
    }
    doc["leq"] = std::move(leq);
    if (!X.coords.empty()) doc["coords"] = X.coords;
  } else {
    const SuspensionRequest& r = f.request;
    doc["kind"] = "suspension_request";
    doc["warping"] = warping_json(r.warping);
    if (r.explicit_interval) doc["interval"] = {num(r.warping.a), num(r.warping.b)};
    doc["base"] = {{"labels", r.base.labels}, {"dist", matrix_json(r.base.dist, r.base.size())}};
    doc["t_grid"] = r.t_grid;
  }
  return dump(doc);
}

void regrid(SpaceFile& f, std::size_t n) {
  if (f.kind != SpaceFile::Kind::suspension_request) {
    throw Error(ErrorCode::usage, kModule, "--grid applies to suspension requests only");
  }
  if (n < 2) throw Error(ErrorCode::usage, kModule, "--grid needs at least 2 times");
  auto& g = f.request.t_grid;
  const double lo = g.front(), hi = g.back();
  g.resize(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = hi;
}

FiniteCausalSpace materialize(const SpaceFile& f, int jobs) {
  if (f.kind == SpaceFile::Kind::finite_causal) {
    check_shape(f.space);
    return f.space;
  }
  return sample_warped_product(f.request.warping, f.request.base, f.request.t_grid, jobs);
}

std::vector<GeodesicParams> parse_geodesic_request(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    fail("$", std::string("invalid JSON (") + e.what() + ")");
  }
  const json& curves = field(doc, "curves", "$");
  if (!curves.is_array()) fail("$.curves", "expected an array");
  std::vector<GeodesicParams> out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::string p = "$.curves[" + std::to_string(i) + "]";
    out.push_back({number(field(curves[i], "omega", p), p + ".omega"), number(field(curves[i], "c", p), p + ".c")});
  }
  return out;
}

std::string emit_geodesic_table(const std::vector<GeodesicParams>& curves, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::parameter, kModule, "step must be positive");
  std::string out = "curve_id,lambda,t,x\n";
  char buf[160];
  for (std::size_t id = 0; id < curves.size(); ++id) {
    const auto [lo, hi] = curves[id].domain();
    const auto k0 = static_cast<long long>(std::floor(lo / step));
    const auto k1 = static_cast<long long>(std::ceil(hi / step));
    for (long long k = k0; k <= k1; ++k) {
      const double lambda = static_cast<double>(k) * step;
      if (!(lambda > lo && lambda < hi)) continue;
      const AdsPoint q = geodesic_point(curves[id], lambda);
      std::snprintf(buf, sizeof buf, "%zu,%.10g,%.15g,%.15g\n", id, lambda, q.t, q.x);
      out += buf;
    }
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::configuration, kModule, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

CommandResult run_command(const std::string& command, const std::string& input, const CliOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Run run;
  run.report = base_header(command, input, opt);
  auto finish = [&](int code) {
    if (opt.timings) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      run.report["timings"] = {{"total_seconds", dt.count()}};
    }
    return CommandResult{dump(run.report), code};
  };
  auto error_result = [&](const Error& e, int code) {
    run.report["error"] = {{"code", e.qualified()}, {"message", e.what()}};
    run.report["verdict"] = "error";
    return finish(code);
  };
  try {
    bool known = false;
    for (const auto& c : command_names()) known = known || c == command;
    if (!known) throw Error(ErrorCode::usage, kModule, "unknown command \"" + command + "\"");
    if (opt.jobs < 1) throw Error(ErrorCode::usage, kModule, "--jobs must be at least 1");

    if (command == "geodesics") {
      try {
        return {emit_geodesic_table(parse_geodesic_request(input), opt.step), 0};
      } catch (const Error& e) {
        if (e.code() == ErrorCode::parameter) throw Error(ErrorCode::usage, kModule, e.what());
        throw;
      }
    }

    SpaceFile f = parse_space_file(input);
    if (opt.grid) regrid(f, *opt.grid);

    if (command == "suspend") {
      if (f.kind != SpaceFile::Kind::suspension_request) {
        throw Error(ErrorCode::usage, kModule, "suspend needs a suspension_request input");
      }
      SpaceFile out;
      out.kind = SpaceFile::Kind::finite_causal;
      out.space = materialize(f, opt.jobs);
      return {serialize_space_file(out), 0};
    }

    run.report["space"] = nullptr;
    run.report["checks"] = json::array();
    if (command == "validate" && f.kind == SpaceFile::Kind::suspension_request) {
      const ComparisonReport base = validate_metric(f.request.base, opt.tol_exact);
      run.add(base, f.request.base.labels);
      if (!base.pass) {
        run.report["space"] = {{"kind", "suspension_request"}, {"points", nullptr}};
        run.report["verdict"] = "fail";
        return finish(1);
      }
    }
    const FiniteCausalSpace X = materialize(f, opt.jobs);
    run.report["space"] = {{"kind", f.kind == SpaceFile::Kind::finite_causal ? "finite_causal" : "suspension_request"},
                           {"points", X.size()}};

    if (command == "validate") {
      run.add(validate_space(X, opt.tol_exact, opt.jobs), X.labels);
    } else if (command == "myers") {
      run.add(myers_check(X, opt.tol_exact), X.labels);
    } else if (command == "curvature") {
      run_curvature(run, X, opt);
    } else if (command == "subdivide") {
      run_subdivide(run, X, opt);
    } else if (command == "split") {
      run_split(run, f, X, opt);
    }
    run.report["verdict"] = run.pass ? "pass" : "fail";
    return finish(run.pass ? 0 : 1);
  } catch (const Error& e) {
    const bool usage = e.code() == ErrorCode::parse || e.code() == ErrorCode::usage;
    return error_result(e, usage ? 2 : 1);
  }
}

}  // namespace llk
