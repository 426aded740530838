// moctl: experiment driver over the mo library. Subcommands: young (conjugate
// tables, Delta2 certificates, inequality margins), norm (Luxemburg/Amemiya),
// mart (Doob + main-estimate campaigns, UMD ratio search), certify (full
// variable-Lebesgue pipeline with CI exit-code semantics).
//
// Exit codes: 0 success/certified, 1 internal or integrity error (including
// invariant violations and bad configs), 2 theorem hypotheses not met.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mo/bounds.hpp"
#include "mo/delta2.hpp"
#include "mo/doob.hpp"
#include "mo/io.hpp"
#include "mo/martingale.hpp"
#include "mo/norms.hpp"
#include "mo/rng.hpp"
#include "mo/umd.hpp"
#include "mo/variable_lebesgue.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitHypotheses = 2;

struct Overrides {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  int depth = 0;
  double p = 0.0;
  std::string budget;  // "restarts:steps"
};

struct Session {
  mo::KeyValueConfig cfg;
  fs::path out_dir;
  std::uint64_t seed = 0;
};

Session open_session(const Overrides& ov) {
  Session s{mo::KeyValueConfig::load(ov.config), {}, 0};
  s.out_dir = ov.out.empty() ? fs::path(s.cfg.get_string("out", "out")) : fs::path(ov.out);
  fs::create_directories(s.out_dir);
  s.seed = ov.seed >= 0 ? std::uint64_t(ov.seed) : std::uint64_t(s.cfg.get_long("seed", 1));
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

mo::SpaceTable load_space(const mo::KeyValueConfig& cfg) {
  return mo::load_space_csv(cfg.get_string("space"));
}

std::vector<double> atom_exponents(const mo::KeyValueConfig& cfg, const mo::SpaceTable& st) {
  const std::size_t n = st.space.size();
  if (cfg.has("p")) {
    std::vector<double> p = cfg.get_double_list("p");
    if (p.size() == 1) p.assign(n, p[0]);
    if (p.size() != n)
      throw mo::ParseError(cfg.path() + ": 'p' must list 1 or " + std::to_string(n) + " values");
    return p;
  }
  if (st.p) return *st.p;
  throw mo::ParseError(cfg.path() + ": no exponents ('p' key or a p column in the space CSV)");
}

mo::YoungFunction make_family(const mo::KeyValueConfig& cfg, const mo::SpaceTable& st) {
  const std::string family = cfg.get_string("family");
  const std::size_t n = st.space.size();
  if (family == "power") return mo::YoungFunction::power(n, cfg.get_double("p"));
  if (family == "variable_exponent")
    return mo::YoungFunction::variable_exponent(atom_exponents(cfg, st));
  if (family == "holder_conjugate")
    return mo::YoungFunction::holder_conjugate_power(atom_exponents(cfg, st));
  if (family == "exp_minus_one") return mo::YoungFunction::exp_minus_one(n);
  if (family == "tabulated") {
    mo::ConvexTable table;
    table.x = cfg.get_double_list("table_x");
    table.y = cfg.get_double_list("table_y");
    table.infinite_tail = cfg.get_bool("table_infinite_tail", false);
    return mo::YoungFunction::tabulated(n, std::move(table));
  }
  throw mo::ParseError(cfg.path() + ": unknown family '" + family + "'");
}

std::vector<double> lambda_grid(const mo::KeyValueConfig& cfg) {
  mo::LambdaGrid g;
  g.min = cfg.get_double("grid_min", g.min);
  g.max = cfg.get_double("grid_max", g.max);
  g.count = int(cfg.get_long("grid_count", g.count));
  const std::string scale = cfg.get_string("grid_scale", "log");
  if (scale != "log" && scale != "linear")
    throw mo::ParseError(cfg.path() + ": grid_scale must be 'log' or 'linear'");
  g.log_scale = scale == "log";
  return g.points();
}

mo::UmdBudget budget_from(const mo::KeyValueConfig& cfg, const Overrides& ov) {
  mo::UmdBudget b;
  b.restarts = int(cfg.get_long("budget_restarts", b.restarts));
  b.steps = int(cfg.get_long("budget_steps", b.steps));
  if (!ov.budget.empty()) {
    const auto sep = ov.budget.find(':');
    if (sep == std::string::npos) throw mo::ParseError("--budget expects RESTARTS:STEPS");
    b.restarts = std::stoi(ov.budget.substr(0, sep));
    b.steps = std::stoi(ov.budget.substr(sep + 1));
  }
  if (b.restarts < 1 || b.steps < 0)
    throw mo::ParseError("budget must have >= 1 restart and >= 0 steps");
  return b;
}

std::string csv_ext(mo::ExtReal v) { return v.is_finite() ? mo::fmt_double(v.value()) : "inf"; }

// ---------------------------------------------------------------------------

int cmd_young(const Overrides& ov) {
  Session s = open_session(ov);
  s.cfg.check_known_keys({"space", "out", "seed", "family", "p", "table_x", "table_y",
                          "table_infinite_tail", "grid_min", "grid_max", "grid_count",
                          "grid_scale", "allow_h", "delta2_k", "margin_samples"});
  const mo::SpaceTable st = load_space(s.cfg);
  const mo::YoungFunction phi = make_family(s.cfg, st);
  const std::vector<double> grid = lambda_grid(s.cfg);
  const mo::YoungFunction psi = mo::YoungFunction::conjugate_of(phi);
  bool violated = false;

  {
    std::ostringstream os;
    os << "atom_id,x,phi,psi\n";
    for (std::size_t t = 0; t < st.space.size(); ++t)
      for (double x : grid)
        os << st.space.ids[t] << "," << mo::fmt_double(x) << "," << csv_ext(phi.value(t, x))
           << "," << csv_ext(psi.value(t, x)) << "\n";
    write_file(s.out_dir / "conjugate_table.csv", os.str());
  }

  mo::Delta2Certificate cert;
  if (s.cfg.get_bool("allow_h", false))
    cert = mo::estimate_delta2_with_h(phi, st.space, grid, s.cfg.get_double("delta2_k"));
  else
    cert = mo::estimate_delta2(phi, st.space, grid);
  {
    std::ostringstream os;
    os << "valid,K,grid_min,grid_max,grid_count,max_violation,h_l1";
    for (const auto& id : st.space.ids) os << ",h_" << id;
    os << ",reason\n";
    os << (cert.valid ? "true" : "false") << "," << mo::fmt_double(cert.K) << ","
       << mo::fmt_double(grid.front()) << "," << mo::fmt_double(grid.back()) << ","
       << grid.size() << "," << mo::fmt_double(cert.max_violation) << ","
       << mo::fmt_double(cert.h_l1);
    for (std::size_t t = 0; t < st.space.size(); ++t)
      os << "," << mo::fmt_double(cert.valid ? cert.h[t] : 0.0);
    os << "," << cert.reason << "\n";
    write_file(s.out_dir / "delta2.csv", os.str());
    write_file(s.out_dir / "delta2.json", mo::to_json(cert).dump(2) + "\n");
    if (cert.valid && cert.max_violation > 1e-9) violated = true;
  }

  {
    // Young's inequality margins against the numerical conjugate.
    const long samples = s.cfg.get_long("margin_samples", 2000);
    mo::Rng rng(s.seed);
    double min_margin = std::numeric_limits<double>::infinity();
    double max_eq = 0.0;
    for (long i = 0; i < samples; ++i) {
      const std::size_t t = std::size_t(rng.integer(st.space.size()));
      const double x = rng.uniform(0.0, 8.0);
      const double y = rng.uniform(0.0, 8.0);
      const mo::ExtReal m = mo::young_margin(phi, psi, t, x, y);
      if (m.is_finite()) min_margin = std::min(min_margin, m.value());
      if (!phi.value(t, x).is_finite()) continue;
      const double yy = phi.right_derivative(t, x);
      if (!std::isfinite(yy)) continue;
      const mo::ExtReal eq = mo::young_margin(phi, psi, t, x, yy);
      if (eq.is_finite()) max_eq = std::max(max_eq, std::fabs(eq.value()));
    }
    std::ostringstream os;
    os << "samples,min_margin,max_abs_equality_margin\n";
    os << samples << "," << mo::fmt_double(min_margin) << "," << mo::fmt_double(max_eq) << "\n";
    write_file(s.out_dir / "young_margin.csv", os.str());
    if (min_margin < -1e-9 || max_eq > 1e-8) violated = true;
  }

  if (cert.valid) {
    const mo::ComplementBoundReport rep = mo::complement_derivative_bound(psi, cert, grid);
    std::ostringstream os;
    os << "K,proof_margin,stated_margin,points\n";
    os << mo::fmt_double(cert.K) << "," << mo::fmt_double(rep.proof_margin) << ","
       << mo::fmt_double(rep.stated_margin) << "," << rep.points_checked << "\n";
    write_file(s.out_dir / "complement_bound.csv", os.str());
    if (rep.proof_margin < -1e-9) violated = true;
  }

  if (violated) {
    std::cerr << "moctl young: invariant violation (see " << s.out_dir.string() << ")\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_norm(const Overrides& ov) {
  Session s = open_session(ov);
  s.cfg.check_known_keys({"space", "out", "seed", "family", "p", "table_x", "table_y",
                          "table_infinite_tail", "function"});
  const mo::SpaceTable st = load_space(s.cfg);
  const mo::YoungFunction phi = make_family(s.cfg, st);

  std::ostringstream os;
  os << "function,luxemburg,amemiya,ratio,lux_iterations,lux_residual,am_iterations,"
        "am_residual\n";
  bool violated = false;
  for (const auto& path : mo::detail::split(s.cfg.get_string("function"), ',')) {
    const mo::SpaceTable ft = mo::load_space_csv(path);
    if (!ft.value) throw mo::ParseError(path + ": function CSV needs a 'value' column");
    if (ft.space.ids != st.space.ids)
      throw mo::ParseError(path + ": atom ids do not match the space CSV");
    const mo::SimpleFunction f(*ft.value);
    const std::string name = fs::path(path).stem().string();

    const mo::NormResult lux = mo::luxemburg_norm(phi, st.space, f);
    const mo::NormResult am = mo::amemiya_norm(phi, st.space, f);
    nlohmann::json j{{"schema_version", mo::kSchemaVersion},
                     {"luxemburg", mo::to_json(lux)},
                     {"amemiya", mo::to_json(am)}};
    write_file(s.out_dir / (name + "_norms.json"), j.dump(2) + "\n");

    os << name << "," << mo::fmt_double(lux.value) << "," << mo::fmt_double(am.value) << ",";
    if (f.is_zero()) {
      os << ",0,0,0,0\n";
      continue;
    }
    const double ratio = am.value / lux.value;
    os << mo::fmt_double(ratio) << "," << lux.iterations << "," << mo::fmt_double(lux.residual)
       << "," << am.iterations << "," << mo::fmt_double(am.residual) << "\n";
    if (!(ratio >= 1.0 - 1e-9 && ratio <= 2.0 + 1e-9)) violated = true;
  }
  write_file(s.out_dir / "norms.csv", os.str());
  if (violated) {
    std::cerr << "moctl norm: Amemiya/Luxemburg ratio left [1, 2]\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_mart(const Overrides& ov) {
  Session s = open_session(ov);
  s.cfg.check_known_keys({"space", "out", "seed", "family", "p", "table_x", "table_y",
                          "table_infinite_tail", "grid_min", "grid_max", "grid_count",
                          "grid_scale", "depth", "p_exp", "budget_restarts", "budget_steps",
                          "doob_trees", "doob_depth", "doob_p", "main_cases"});
  const mo::SpaceTable st = load_space(s.cfg);
  const auto space = std::make_shared<const mo::OrliczSpace>(st.space, make_family(s.cfg, st));
  const int depth = ov.depth > 0 ? ov.depth : int(s.cfg.get_long("depth", 6));
  const double p_exp = ov.p > 1.0 ? ov.p : s.cfg.get_double("p_exp", 2.0);
  const mo::UmdBudget budget = budget_from(s.cfg, ov);
  bool violated = false;

  {
    // Doob campaign on |f(t)| fibers of random martingales.
    const long trees = s.cfg.get_long("doob_trees", 1000);
    const int doob_depth = int(s.cfg.get_long("doob_depth", depth));
    const std::vector<double> ps =
        s.cfg.has("doob_p") ? s.cfg.get_double_list("doob_p") : std::vector<double>{1.5, 2.0, 3.0};
    std::ostringstream os;
    os << "p,q,c,trees,min_margin,min_precondition_margin\n";
    const std::vector<double> pre_grid = mo::LambdaGrid{1e-3, 1e3, 60, true}.points();
    for (double p : ps) {
      const mo::YoungFunction scalar_phi = mo::YoungFunction::power(1, p);
      mo::Rng rng(mo::Rng::mix(s.seed, std::uint64_t(p * 1000)));
      double min_margin = std::numeric_limits<double>::infinity();
      double min_pre = std::numeric_limits<double>::infinity();
      for (long i = 0; i < trees; ++i) {
        const int d = 1 + int(rng.integer(std::uint64_t(doob_depth)));
        mo::PaleyWalshMartingale f = mo::random_martingale(space, d, 1.0, rng);
        const std::size_t atom = std::size_t(rng.integer(space->atoms.size()));
        const mo::DoobCheck chk =
            mo::doob_check(scalar_phi, p, 0.0, mo::abs_fiber(f, atom), pre_grid);
        min_pre = std::min(min_pre, chk.precondition_margin);
        if (!chk.accepted) {
          violated = true;
          continue;
        }
        min_margin = std::min(min_margin, chk.margin);
      }
      os << mo::fmt_double(p) << "," << mo::fmt_double(p) << ",0," << trees << ","
         << mo::fmt_double(min_margin) << "," << mo::fmt_double(min_pre) << "\n";
      if (min_margin < -1e-9) violated = true;
    }
    write_file(s.out_dir / "doob.csv", os.str());
  }

  {
    // Main-estimate campaign; needs a valid Delta2 pair for Phi and its
    // conjugate, otherwise the theorem hypotheses fail and rows say so.
    const std::vector<double> grid = lambda_grid(s.cfg);
    const mo::Delta2Certificate cert_phi = mo::estimate_delta2(space->phi, st.space, grid);
    const mo::Delta2Certificate cert_psi =
        mo::estimate_delta2(mo::YoungFunction::conjugate_of(space->phi), st.space, grid);
    std::ostringstream os;
    os << "cases,min_margin,bound,K_phi,K_psi,C_h,status\n";
    if (cert_phi.valid && cert_psi.valid) {
      const long cases = s.cfg.get_long("main_cases", 200);
      mo::Rng rng(mo::Rng::mix(s.seed, 0xD0B));
      double min_margin = std::numeric_limits<double>::infinity();
      for (long i = 0; i < cases; ++i) {
        const int d = 1 + int(rng.integer(std::uint64_t(depth)));
        const mo::PaleyWalshMartingale f = mo::random_martingale(space, d, 1.0, rng);
        const mo::SignSequence eps =
            mo::SignSequence::from_mask(std::size_t(d), rng.integer(std::uint64_t(1) << d));
        min_margin = std::min(
            min_margin, mo::main_estimate_check(f, eps, cert_phi, cert_psi,
                                                mo::kScalarFiberZeta00));
      }
      const double bound = cert_psi.K * mo::c_kx_bound(cert_phi.K, mo::kScalarFiberZeta00).C *
                           mo::c_h(cert_phi.h_l1, cert_psi.K, cert_psi.h_l1);
      os << cases << "," << mo::fmt_double(min_margin) << "," << mo::fmt_double(bound) << ","
         << mo::fmt_double(cert_phi.K) << "," << mo::fmt_double(cert_psi.K) << ","
         << mo::fmt_double(mo::c_h(cert_phi.h_l1, cert_psi.K, cert_psi.h_l1)) << ",ok\n";
      if (min_margin < 0.0) violated = true;
    } else {
      os << "0,,,,,,"
         << "delta2-pair-failed: " << (cert_phi.valid ? cert_psi.reason : cert_phi.reason)
         << "\n";
    }
    write_file(s.out_dir / "main_estimate.csv", os.str());
  }

  {
    const mo::UmdEstimate est = mo::estimate_umd(space, p_exp, depth, budget, s.seed);
    write_file(s.out_dir / "umd.json", mo::to_json(est, budget).dump(2) + "\n");
    std::ostringstream os;
    mo::write_martingale_csv(os, est.best_martingale);
    write_file(s.out_dir / "best_martingale.csv", os.str());
    if (est.best_ratio < 1.0 - 1e-9) violated = true;
  }

  if (violated) {
    std::cerr << "moctl mart: invariant violation (see " << s.out_dir.string() << ")\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_certify(const Overrides& ov) {
  Session s = open_session(ov);
  s.cfg.check_known_keys({"space", "out", "seed", "p", "grid_min", "grid_max", "grid_count",
                          "grid_scale", "depth", "p_exp", "budget_restarts", "budget_steps",
                          "betas"});
  const mo::SpaceTable st = load_space(s.cfg);
  std::vector<double> p_map;
  if (s.cfg.has("p")) {
    p_map = s.cfg.get_double_list("p");
    if (p_map.size() == 1) p_map.assign(st.space.size(), p_map[0]);
  } else if (st.p) {
    p_map = *st.p;
  } else {
    throw mo::ParseError(s.cfg.path() + ": certify needs exponents ('p' key or p column)");
  }
  if (p_map.size() != st.space.size())
    throw mo::ParseError(s.cfg.path() + ": exponent count does not match atoms");
  for (double p : p_map)
    if (!(p >= 1.0)) throw mo::ParseError(s.cfg.path() + ": exponents must be >= 1");

  const std::vector<double> grid = lambda_grid(s.cfg);
  const mo::VariableLebesgue vl = mo::variable_lebesgue(st.space, p_map);
  const mo::Delta2Certificate cert_phi = mo::estimate_delta2(vl.phi, st.space, grid);
  const mo::Delta2Certificate cert_psi = mo::estimate_delta2(vl.psi_holder, st.space, grid);

  nlohmann::json j{{"schema_version", mo::kSchemaVersion},
                   {"seed", s.seed},
                   {"certificate_phi", mo::to_json(cert_phi)},
                   {"certificate_psi", mo::to_json(cert_psi)}};

  if (!cert_phi.valid || !cert_psi.valid) {
    j["certified"] = false;
    j["hypotheses_met"] = false;
    j["checksum"] = std::to_string(mo::fnv1a64(j.dump()));
    write_file(s.out_dir / "certify_report.json", j.dump(2) + "\n");
    std::cerr << "moctl certify: Delta2 hypotheses not met: "
              << (cert_phi.valid ? cert_psi.reason : cert_phi.reason) << "\n";
    return kExitHypotheses;
  }

  const double p_exp = ov.p > 1.0 ? ov.p : s.cfg.get_double("p_exp", 2.0);
  std::vector<double> betas{p_exp};
  if (s.cfg.has("betas")) betas = s.cfg.get_double_list("betas");
  const mo::VariableLebesgueReport vr = mo::variable_lebesgue_report(p_map, betas);
  if (!vr.admissible) {
    j["certified"] = false;
    j["hypotheses_met"] = false;
    j["reason"] = vr.reason;
    j["checksum"] = std::to_string(mo::fnv1a64(j.dump()));
    write_file(s.out_dir / "certify_report.json", j.dump(2) + "\n");
    std::cerr << "moctl certify: " << vr.reason << "\n";
    return kExitHypotheses;
  }

  // Round-trip consistency between the grid certificates and the closed-form
  // constants; a mismatch is an internal error, not a finding.
  if (std::fabs(cert_phi.K - vr.report.K_phi) > 1e-12 * vr.report.K_phi ||
      std::fabs(cert_psi.K - vr.report.K_psi) > 1e-12 * vr.report.K_psi) {
    std::cerr << "moctl certify: certificate/report constant mismatch\n";
    return kExitError;
  }

  const int depth = ov.depth > 0 ? ov.depth : int(s.cfg.get_long("depth", 4));
  const mo::UmdBudget budget = budget_from(s.cfg, ov);
  const auto space = std::make_shared<const mo::OrliczSpace>(st.space, vl.phi);
  const mo::UmdEstimate est = mo::estimate_umd(space, p_exp, depth, budget, s.seed);
  const mo::CertifyResult res = mo::certify(est, vr.report);

  write_file(s.out_dir / "constants.txt", mo::constants_table(vr.report));
  j["hypotheses_met"] = true;
  j["constants"] = mo::to_json(vr.report);
  j["empirical"] = mo::to_json(est, budget);
  j["certified"] = res.certified;
  j["bound"] = res.bound;
  j["lower_margin"] = res.lower_margin;
  j["upper_margin"] = res.upper_margin;
  j["checksum"] = std::to_string(mo::fnv1a64(j.dump()));
  write_file(s.out_dir / "certify_report.json", j.dump(2) + "\n");

  std::cout << "certified: " << (res.certified ? "yes" : "no") << "  best_ratio "
            << mo::fmt_double(est.best_ratio) << "  bound " << mo::fmt_double(res.bound) << "\n";
  return res.certified ? kExitOk : kExitError;
}

int cmd_verify_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "moctl certify: cannot open " << path << "\n";
    return kExitError;
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("checksum")) {
    std::cerr << "moctl certify: not a report file\n";
    return kExitError;
  }
  const std::string stored = j["checksum"];
  j.erase("checksum");
  if (std::to_string(mo::fnv1a64(j.dump())) != stored) {
    std::cerr << "moctl certify: integrity error, checksum mismatch\n";
    return kExitError;
  }
  std::cout << "report intact\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Musielak-Orlicz norms and the martingale laboratory"};
  app.require_subcommand(1);

  Overrides ov;
  std::string verify_path;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", ov.config, "flat key = value experiment config");
    if (config_required) opt->required();
    sub->add_option("--out", ov.out, "output directory (overrides config)");
    sub->add_option("--seed", ov.seed, "RNG seed (overrides config)");
    sub->add_option("--depth", ov.depth, "martingale depth (overrides config)");
    sub->add_option("--p", ov.p, "L^p(Omega) exponent (overrides config)");
    sub->add_option("--budget", ov.budget, "search budget RESTARTS:STEPS (overrides config)");
  };

  auto* young = app.add_subcommand("young", "conjugate tables, Delta2 certificates, margins");
  add_common(young, true);
  auto* norm = app.add_subcommand("norm", "Luxemburg and Amemiya norms for function CSVs");
  add_common(norm, true);
  auto* mart = app.add_subcommand("mart", "Doob / main-estimate campaigns and UMD search");
  add_common(mart, true);
  auto* certify = app.add_subcommand("certify", "variable-Lebesgue certification pipeline");
  add_common(certify, false);
  certify->add_option("--verify", verify_path, "check the checksum of an existing report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;  // fold CLI11 codes into the tri-state
  }

  try {
    if (young->parsed()) return cmd_young(ov);
    if (norm->parsed()) return cmd_norm(ov);
    if (mart->parsed()) return cmd_mart(ov);
    if (certify->parsed()) {
      if (!verify_path.empty()) return cmd_verify_report(verify_path);
      if (ov.config.empty()) {
        std::cerr << "moctl certify: --config or --verify is required\n";
        return kExitError;
      }
      return cmd_certify(ov);
    }
  } catch (const mo::ParseError& e) {
    std::cerr << "moctl: config error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "moctl: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
