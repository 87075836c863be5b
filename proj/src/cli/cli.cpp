#include "fuchs/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "fuchs/catalog.hpp"
#include "fuchs/verify.hpp"

namespace fuchs::cli {

using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kOperational = 2;

/// Bad input or environment; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string complex_text(cplx z) {
  if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z.real()))) return rational_text(z.real());
  const std::string re = rational_text(z.real());
  const std::string im = rational_text(std::abs(z.imag()));
  return "(" + re + (z.imag() < 0 ? "-" : "+") + im + "*I)";
}

std::optional<Rational> recognize(double v) {
  for (std::int64_t q = 1; q <= 1000; ++q) {
    const double p = std::round(v * static_cast<double>(q));
    if (std::abs(p) > 1e15) return std::nullopt;
    if (std::abs(v - p / static_cast<double>(q)) <= 1e-9 * std::max(1.0, std::abs(v))) {
      return Rational(static_cast<std::int64_t>(p), q);
    }
  }
  return std::nullopt;
}

/// Airy scales are cube roots; "4^(1/3)" reads better than 1.5874.
std::string scale_text(cplx s) {
  if (std::abs(s.imag()) > 1e-9 * (1.0 + std::abs(s.real()))) return complex_text(s);
  if (recognize(s.real())) return rational_text(s.real());
  const double cube = s.real() * s.real() * s.real();
  if (auto r = recognize(cube)) return (r->is_integer() ? r->str() : "(" + r->str() + ")") + "^(1/3)";
  return format_double(s.real());
}

json target_json(const ClassicalTarget& t) {
  json j{{"kind", to_string(t.kind)}};
  json values = json::object();
  for (const auto& [name, value] : t.params) {
    j[name] = name == "scale" ? scale_text(value) : complex_text(value);
    values[name] = complex_json(value);
  }
  j["values"] = values;
  return j;
}

json box_json(const Box& b) { return json{{"lo", complex_json(b.lo)}, {"hi", complex_json(b.hi)}}; }

json named_json(const std::vector<NamedExpr>& v) {
  json j = json::object();
  for (const auto& n : v) j[n.name] = n.text;
  return j;
}

json manifest_json(const CatalogEntry& e) {
  json j;
  j["schema"] = "fuchs-manifest/1";
  j["id"] = e.id;
  j["family"] = to_string(e.family);
  j["solution"] = e.solution;
  j["negative"] = e.negative;
  json fp = json::object();
  for (const auto& [name, value] : e.free_params) fp[name] = value.str();
  j["free_params"] = fp;
  j["fixed_params"] = named_json(e.fixed_params);
  j["closed_forms"] = named_json(e.closed_forms);
  json vars = json::array();
  for (const auto& v : e.variants) {
    vars.push_back({{"description", v.description},
                    {"fixed_params", named_json(v.params)},
                    {"closed_forms", named_json(v.closed_forms)}});
  }
  j["variants"] = vars;
  j["component"] = to_string(e.component);
  j["pre_substitution"] = e.pre_substitution;
  j["direct_scalar_pair"] = e.direct_scalar_pair;
  j["basepoint_x"] = complex_json(e.basepoint_x);
  j["x_box"] = box_json(e.x_box);
  j["t_box"] = box_json(e.t_box);
  j["singular_x"] = e.singular_x;
  j["singular_t"] = e.singular_t;
  j["tau_closed"] = e.tau_closed.empty() ? json(nullptr) : json(e.tau_closed);
  j["gauge_closed"] = e.gauge_closed.empty() ? json(nullptr) : json(e.gauge_closed);
  if (e.expected_decomposition) {
    const auto& d = *e.expected_decomposition;
    j["expected_decomposition"] = {{"f", d.f}, {"h", d.h}, {"R", d.R}, {"M", d.M}};
  } else {
    j["expected_decomposition"] = nullptr;
  }
  j["expected_target"] = {{"kind", to_string(e.expected_target.kind)}, {"params", named_json(e.expected_target.params)}};
  return j;
}

bool family_matches(Family f, const std::string& want) {
  if (want.empty() || want == to_string(f)) return true;
  return want == "PV" && f == Family::PV_Kitaev;
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError(std::string(what) + " expects re,im");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {re, im};
  } catch (const std::logic_error&) {
    throw UsageError(std::string(what) + ": cannot read '" + text + "'");
  }
}

struct Common {
  bool json_out = false;
  std::uint64_t seed = 42;
  std::vector<std::string> params;
  std::string basepoint;
  Tolerances tol;

  Config config() const {
    Config c;
    c.seed = seed;
    c.tol = tol;
    for (const std::string& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=rational, got '" + p + "'");
      try {
        c.params[p.substr(0, eq)] = Rational::parse(p.substr(eq + 1));
      } catch (const std::exception& e) {
        throw UsageError("--param " + p + ": " + e.what());
      }
    }
    if (!basepoint.empty()) {
      const auto [re, im] = parse_pair(basepoint, "--basepoint");
      c.region.basepoint_x = cplx(re, im);
    }
    return c;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_flag("--json", c.json_out, "Machine-readable output");
  app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app->add_option("--param", c.params, "Free parameter override name=p/q")->take_all();
  app->add_option("--basepoint", c.basepoint, "Basepoint x0 as re,im");
  const std::pair<const char*, double*> tols[] = {
      {"--tol-frobenius", &c.tol.frobenius},      {"--tol-flow", &c.tol.flow},
      {"--tol-decomposition", &c.tol.decomposition}, {"--tol-scalar", &c.tol.scalar},
      {"--tol-first-integral", &c.tol.first_integral}, {"--tol-independence", &c.tol.independence},
      {"--tol-match", &c.tol.match},              {"--tol-crossval", &c.tol.crossval},
  };
  for (const auto& [name, ptr] : tols) {
    app->add_option(name, *ptr)->check(CLI::PositiveNumber)->capture_default_str();
  }
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw UsageError("cannot write " + tmp.string());
    f << text;
    if (!f) throw UsageError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw UsageError("cannot rename " + tmp.string() + ": " + ec.message());
}

int cmd_list(const Common& c, const std::string& family, std::ostream& out) {
  json arr = json::array();
  for (const std::string& id : list_all_entries()) {
    const CatalogEntry& e = lookup(id);
    if (!family_matches(e.family, family)) continue;
    if (c.json_out) {
      arr.push_back(manifest_json(e));
      continue;
    }
    std::string target = to_string(e.expected_target.kind);
    if (!e.expected_target.params.empty()) {
      target += "(";
      for (std::size_t i = 0; i < e.expected_target.params.size(); ++i) {
        if (i) target += ", ";
        target += e.expected_target.params[i].name + "=" + e.expected_target.params[i].text;
      }
      target += ")";
    }
    std::string params;
    for (const auto& [name, value] : e.free_params) params += (params.empty() ? "" : " ") + name + "=" + value.str();
    out << e.id << "  " << to_string(e.family) << "  " << target;
    if (!params.empty()) out << "  [" << params << "]";
    if (e.negative) out << "  (negative control)";
    out << "\n";
  }
  if (c.json_out) out << arr.dump(2) << "\n";
  return kPass;
}

int cmd_reduce(const Common& c, const std::string& id, std::ostream& out) {
  const Config cfg = c.config();
  const Pipeline pl = build_pipeline(id, cfg);
  const CatalogEntry& e = *pl.inst.entry;

  json j;
  j["schema"] = "fuchs-reduce/1";
  j["id"] = e.id;
  j["family"] = to_string(e.family);
  j["component"] = to_string(e.component);
  json params = json::object();
  for (const auto& [name, value] : pl.inst.params) params[name] = complex_text(value);
  j["params"] = params;
  j["basepoint_x"] = complex_json(pl.region.basepoint_x);

  // Stored closed forms are shown when they agree with the computed split.
  const Decomposition& d = pl.dec;
  const Expr* got[4] = {&d.f, &d.h, &d.R, &d.M};
  const char* names[4] = {"f", "h", "R", "M"};
  bool closed_ok = false;
  if (e.expected_decomposition) {
    const auto& ed = *e.expected_decomposition;
    const std::string* texts[4] = {&ed.f, &ed.h, &ed.R, &ed.M};
    closed_ok = true;
    for (int i = 0; i < 4; ++i) {
      const Expr want = pl.inst.bind(*texts[i]);
      const double err = max_abs(*got[i] - want, pl.region.probes) / (1.0 + max_abs(want, pl.region.probes));
      closed_ok = closed_ok && err <= cfg.tol.decomposition;
    }
    if (closed_ok) {
      for (int i = 0; i < 4; ++i) j[names[i]] = *texts[i];
    }
  }
  if (!closed_ok) {
    for (int i = 0; i < 4; ++i) j[names[i]] = to_string(*got[i]);
  }
  j["closed_form_verified"] = closed_ok;
  j["case"] = to_string(pl.red->case_tag());
  j["exponent_A"] = d.exponent_A ? complex_json(*d.exponent_A) : json(nullptr);
  j["constant_B"] = complex_json(d.constant_B);
  j["flags"] = {{"f_zero", d.f_zero}, {"h_zero", d.h_zero}, {"M_zero", d.M_zero}, {"M_constant", d.M_constant}};
  j["decomposition_residual"] = d.residual;
  j["tau"] = e.tau_closed.empty() ? json(nullptr) : json(e.tau_closed);
  j["gauge"] = e.gauge_closed.empty() ? json(nullptr) : json(e.gauge_closed);
  const Frame& fr = pl.red->frame();
  j["frame"] = {{"c", complex_json(fr.c)}, {"d", complex_json(fr.d)}, {"calibrated", fr.calibrated}};

  const Independence ind = check_t_independence(pl, cfg.n_pairs, cfg.seed);
  j["t_independence_max"] = ind.max_deviation;
  const Match m = match_classical(ind.samples);
  j["target"] = target_json(m.target);
  j["match_residual"] = m.residual;
  out << j.dump(2) << "\n";
  return kPass;
}

json report_json(const VerificationReport& r) {
  json j;
  j["schema"] = "fuchs-verify/1";
  j["id"] = r.id;
  j["passed"] = r.passed;
  j["tolerances"] = {{"frobenius", r.tol.frobenius},
                     {"flow", r.tol.flow},
                     {"decomposition", r.tol.decomposition},
                     {"scalar", r.tol.scalar},
                     {"first_integral", r.tol.first_integral},
                     {"independence", r.tol.independence},
                     {"match", r.tol.match},
                     {"crossval", r.tol.crossval}};
  j["frobenius_max"] = optional_number(r.frobenius_max);
  j["flow_max"] = r.flow_max;
  j["scalar_residual_max"] = optional_number(r.scalar_residual_max);
  j["decomposition_residual"] = optional_number(r.decomposition_residual);
  j["expected_decomposition_error"] = optional_number(r.expected_decomposition_error);
  j["case"] = r.case_tag ? json(to_string(*r.case_tag)) : json(nullptr);
  j["exponent_A"] = r.exponent_A ? complex_json(*r.exponent_A) : json(nullptr);
  j["frame"] = r.frame ? json{{"c", complex_json(r.frame->c)}, {"d", complex_json(r.frame->d)},
                             {"calibrated", r.frame->calibrated}}
                       : json(nullptr);
  j["first_integral_max"] = optional_number(r.first_integral_max);
  j["t_independence_max"] = optional_number(r.t_independence_max);
  j["match"] = r.match ? target_json(r.match->target) : json(nullptr);
  j["match_residual"] = r.match ? json(r.match->residual) : json(nullptr);
  j["target_error"] = optional_number(r.target_error);
  j["cross_validation_residual"] = optional_number(r.cross_validation_residual);
  j["errors"] = r.errors;
  return j;
}

std::string short_number(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", *v);
  return buf;
}

int cmd_verify(const Common& c, std::vector<std::string> ids, bool all, const std::string& out_dir,
               std::ostream& out) {
  const Config cfg = c.config();
  if (all) ids = list_entries();
  if (ids.empty()) throw UsageError("verify needs an entry id or --all");
  // Unknown ids and bad overrides are usage errors, not failed checks.
  for (const std::string& id : ids) instantiate(id, cfg.params);
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UsageError("cannot create " + out_dir + ": " + ec.message());
  }
  bool all_passed = true;
  json arr = json::array();
  for (const std::string& id : ids) {
    const VerificationReport r = full_report(id, cfg);
    all_passed = all_passed && r.passed;
    const json j = report_json(r);
    if (!out_dir.empty()) write_atomically(std::filesystem::path(out_dir) / (id + ".json"), j.dump(2) + "\n");
    if (c.json_out) {
      arr.push_back(j);
      continue;
    }
    out << (r.passed ? "PASS " : "FAIL ") << r.id << "  frobenius=" << short_number(r.frobenius_max)
        << " flow=" << short_number(r.flow_max) << " independence=" << short_number(r.t_independence_max)
        << " match=" << (r.match ? to_string(r.match->target.kind) : "-")
        << " crossval=" << short_number(r.cross_validation_residual) << "\n";
    for (const std::string& e : r.errors) out << "  error: " << e << "\n";
  }
  if (c.json_out) out << arr.dump(2) << "\n";
  return all_passed ? kPass : kFail;
}

int cmd_sample(const Common& c, const std::string& id, const std::string& path, std::size_t n, std::ostream& out) {
  const Config cfg = c.config();
  const Pipeline pl = build_pipeline(id, cfg);
  std::string csv = "tau_re,tau_im,P_re,P_im,Q_re,Q_im,x_re,x_im,t_re,t_im\n";
  if (n > 0) {
    const Independence ind = check_t_independence(pl, (n + 1) / 2, cfg.seed);
    for (std::size_t i = 0; i < n; ++i) {
      const Sample& s = ind.samples[i];
      const cplx cols[5] = {s.tau, s.P, s.Q, s.x, s.t};
      for (int k = 0; k < 5; ++k) {
        csv += format_double(cols[k].real()) + "," + format_double(cols[k].imag());
        csv += k == 4 ? "\n" : ",";
      }
    }
  }
  if (path == "-") {
    out << csv;
  } else {
    write_atomically(path, csv);
  }
  return kPass;
}

int cmd_manifest(const std::vector<std::string>& ids, bool all, const std::string& dir, std::ostream& out) {
  std::vector<std::string> sel = all ? list_all_entries() : ids;
  if (sel.empty()) throw UsageError("manifest needs an entry id or --all");
  for (const std::string& id : sel) {
    const std::string text = manifest_text(id);
    if (dir.empty()) {
      out << text;
    } else {
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw UsageError("cannot create " + dir + ": " + ec.message());
      write_atomically(std::filesystem::path(dir) / (id + ".json"), text);
    }
  }
  return kPass;
}

}  // namespace

std::string rational_text(double v) {
  if (!std::isfinite(v)) return format_double(v);
  if (auto r = recognize(v)) return r->str();
  return format_double(v);
}

std::string manifest_text(std::string_view id) { return manifest_json(lookup(id)).dump(2) + "\n"; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reductions of isomonodromic Lax pairs to t-independent equations", "fuchs"};
  app.require_subcommand(1);

  Common common;
  std::string family;
  auto* list = app.add_subcommand("list", "List catalog entries");
  add_common(list, common);
  list->add_option("--family", family, "Only entries of this family (PII, PIII, PIV, PV)");

  std::string reduce_id;
  auto* reduce = app.add_subcommand("reduce", "Decompose an entry and report the reduced equation as JSON");
  add_common(reduce, common);
  reduce->add_option("id", reduce_id, "Entry id")->required();

  std::vector<std::string> verify_ids;
  bool verify_all = false;
  std::string verify_out = "reports";
  auto* verify = app.add_subcommand("verify", "Run every check and write one JSON report per entry");
  add_common(verify, common);
  verify->add_option("ids", verify_ids, "Entry ids");
  verify->add_flag("--all", verify_all, "All positive entries");
  verify->add_option("--out", verify_out, "Report directory; empty to skip writing")->capture_default_str();

  std::string sample_id, sample_out;
  std::size_t sample_n = 64;
  auto* sample = app.add_subcommand("sample", "Write tau-matched coefficient samples as CSV");
  add_common(sample, common);
  sample->add_option("id", sample_id, "Entry id")->required();
  sample->add_option("--out", sample_out, "CSV file, or - for stdout")->required();
  sample->add_option("-n", sample_n, "Number of samples")->capture_default_str();

  std::vector<std::string> manifest_ids;
  bool manifest_all = false;
  std::string manifest_dir;
  auto* manifest = app.add_subcommand("manifest", "Print or write catalog manifests");
  manifest->add_option("ids", manifest_ids, "Entry ids");
  manifest->add_flag("--all", manifest_all, "All entries including negative controls");
  manifest->add_option("--dir", manifest_dir, "Write <id>.json files here instead of printing");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPass : kOperational;
  }

  try {
    if (list->parsed()) return cmd_list(common, family, out);
    if (reduce->parsed()) return cmd_reduce(common, reduce_id, out);
    if (verify->parsed()) return cmd_verify(common, verify_ids, verify_all, verify_out, out);
    if (sample->parsed()) return cmd_sample(common, sample_id, sample_out, sample_n, out);
    if (manifest->parsed()) return cmd_manifest(manifest_ids, manifest_all, manifest_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOperational;
  }
  return kOperational;
}

}  // namespace fuchs::cli
