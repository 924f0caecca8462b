#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>

#include <CLI11.hpp>
#include <photonsim/photonsim.hpp>

#include "cli_io.hpp"

using namespace photonsim;
using lattice::Vec2;
using cli::Cell;
using cli::config_error;
using cli::json;
using cli::Params;
using cli::Series;
using cli::Table;

namespace {

struct Context {
  Params params;
  std::uint64_t seed{1};
  int threads{1};
  std::string preset;
};

struct Outcome {
  Table table;
  std::string svg;
  json summary = json::object();
  bool valid{true};
  std::map<std::string, Table> extra;  // additional CSV files by name
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<std::string> columns;
  json defaults;
  std::string default_preset;  // empty when no lattice is involved
  std::function<Outcome(const Context&)> run;
};

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw config_error("config: need at least two grid points");
  std::vector<double> x;
  for (int k = 0; k < n; ++k) x.push_back(lo + (hi - lo) * k / (n - 1));
  return x;
}

Series series(const Table& t, const std::string& x, const std::string& y, std::string label = "") {
  return {label.empty() ? y : std::move(label), t.column(x), t.column(y)};
}

lattice::LatticeGeometry preset_geometry(const std::string& name) {
  if (name == "disk-1192") return lattice::disk1192_lattice();
  if (name == "crop-400x300") return lattice::graphene_crop(400, 300);
  if (name == "disk-150") return lattice::graphene_disk(150.0);
  throw config_error("unknown preset '" + name + "' (available: disk-1192, crop-400x300, disk-150)");
}

lattice::VortexLattice vortex_setup(const Context& c) {
  auto v = lattice::vortex_preset(preset_geometry(c.preset));
  v.delta0 = c.params.num("delta0");
  v.l0 = c.params.num("l0");
  return v;
}

std::vector<InternalState> pair_states(double tau, double sigma) {
  const auto basis = InternalBasis::temporal({{0, sigma, 0}, {tau, sigma, 0}});
  return {InternalState::of(basis, 0, PolarizationState::H()), InternalState::of(basis, 1, PolarizationState::H())};
}

Outcome run_hom(const Context& c) {
  Outcome o;
  o.table.columns = {"tau", "P11_boson", "P11_fermion", "P11_classical"};
  const double sigma = c.params.num("sigma");
  for (double tau : linspace(c.params.num("tau_min"), c.params.num("tau_max"), c.params.integer("points"))) {
    const auto st = pair_states(tau, sigma);
    o.table.add({tau, event_probability(beamsplitter(), st, {1, 1}, {1, 1}, Statistics::boson),
                 event_probability(beamsplitter(), st, {1, 1}, {1, 1}, Statistics::fermion),
                 event_probability(beamsplitter(), st, {1, 1}, {1, 1}, Statistics::classical)});
  }
  o.summary["P11_at_zero_delay"] = event_probability(beamsplitter(), pair_states(0.0, sigma), {1, 1}, {1, 1});
  o.svg = cli::line_plot({series(o.table, "tau", "P11_boson"), series(o.table, "tau", "P11_fermion"),
                          series(o.table, "tau", "P11_classical")},
                         "delay tau / sigma", "P(1,1)");
  return o;
}

Outcome run_three_photon(const Context& c, bool mercedes) {
  Outcome o;
  o.table.columns = {"tau", "P111"};
  const auto taus = linspace(c.params.num("tau_min"), c.params.num("tau_max"), c.params.integer("points"));
  const double sigma = c.params.num("sigma");
  const auto p = mercedes ? mercedes_scan(taus, sigma) : w_shape_scan(taus, sigma);
  int minima = 0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    o.table.add({taus[k], p[k]});
    if (k > 0 && k + 1 < taus.size() && p[k] < p[k - 1] && p[k] < p[k + 1]) ++minima;
  }
  o.summary["interior_minima"] = minima;
  o.summary["P111_min"] = *std::min_element(p.begin(), p.end());
  o.summary["P111_max"] = *std::max_element(p.begin(), p.end());
  o.svg = cli::line_plot({series(o.table, "tau", "P111")}, "delay tau / sigma", "P(1,1,1)");
  return o;
}

Outcome run_triad_sweep(const Context& c) {
  Outcome o;
  o.table.columns = {"theta", "triad_phase", "P111", "P011", "P101", "P110"};
  for (const auto& p : triad_sweep(linspace(0.0, pi / 2, c.params.integer("points")), c.params.num("sigma")))
    o.table.add({p.theta, p.triad_phase, p.p111, p.p011, p.p101, p.p110});
  o.svg = cli::line_plot({series(o.table, "theta", "P111"), series(o.table, "theta", "P011"),
                          series(o.table, "theta", "P101"), series(o.table, "theta", "P110")},
                         "theta (rad)", "probability");
  return o;
}

Outcome run_circle_dance(const Context& c) {
  Outcome o;
  o.table.columns = {"theta", "P5678", "P5678_formula"};
  auto sc = optimized_circle_dance(c.params.num("residual"), c.params.num("sigma"), c.params.num("width_ratio"));
  sc.chi = c.params.num("chi");
  const auto r = circle_overlaps(sc);
  double emax = 0, emin = 1, fmax = 0, fmin = 1;
  for (double theta : linspace(0.0, 2 * pi, c.params.integer("points"))) {
    sc.theta = theta;
    const double e = circle_dance_probability(sc), f = p5678_formula(r, sc.chi, theta);
    emax = std::max(emax, e), emin = std::min(emin, e), fmax = std::max(fmax, f), fmin = std::min(fmin, f);
    o.table.add({theta, e, f});
  }
  o.summary["t2"] = sc.t2;
  o.summary["t3"] = sc.t3;
  o.summary["overlaps"] = {r.rab, r.rbc, r.rcd, r.rad};
  o.summary["visibility"] = fringe_visibility(emax, emin);
  o.summary["visibility_formula"] = fringe_visibility(fmax, fmin);
  o.svg = cli::line_plot({series(o.table, "theta", "P5678"), series(o.table, "theta", "P5678_formula")}, "theta (rad)",
                         "P(1,1,1,1)");
  return o;
}

Outcome run_locking(const Context& c) {
  Outcome o;
  o.table.columns = {"chi", "P_engine", "P_formula"};
  const double r = c.params.num("r");
  if (!(r >= 0.0 && r <= 1.0)) throw config_error("config: r must lie in [0, 1]");
  const auto basis = InternalBasis::generic(2);
  CVector b(2);
  b << r, std::sqrt(1 - r * r);
  const InternalState a = InternalState::basis_vector(basis, 0), bc(basis, b);
  for (double chi : linspace(0.0, 2 * pi, c.params.integer("points")))
    o.table.add({chi, event_probability(quitter(chi), {a, a, bc, a}, {1, 0, 1, 0}, {1, 0, 0, 1}), locking_signal(chi, r)});
  o.svg = cli::line_plot({series(o.table, "chi", "P_engine"), series(o.table, "chi", "P_formula")}, "chi (rad)",
                         "two-fold probability");
  return o;
}

Outcome run_ghz(const Context& c) {
  Outcome o;
  o.table.columns = {"phase", "P_full_k0", "P_full_k1"};
  const int n = c.params.integer("n");
  for (double ph : linspace(0.0, 2 * pi, c.params.integer("points")))
    o.table.add({ph, ghz_probability(n, n, 0, ph, true), ghz_probability(n, n - 1, 1, ph, true)});
  o.summary["P_partial_j1_k0"] = ghz_probability(n, 1, 0, 0.0, false);
  o.svg = cli::line_plot({series(o.table, "phase", "P_full_k0"), series(o.table, "phase", "P_full_k1")}, "phase (rad)",
                         "probability");
  return o;
}

Outcome run_noise_model(const Context& c) {
  Outcome o;
  o.table.columns = {"quantity", "visibility"};
  SourceModel m;
  m.lambda = c.params.num("lambda");
  m.purity = c.params.num("purity");
  m.p_idler_noise = c.params.num("p_idler_noise");
  m.p_signal_noise = c.params.num("p_signal_noise");
  m.max_photons = c.params.integer("max_photons");
  m.max_noise = c.params.integer("max_noise");
  m.validate();
  const auto v = noise_model_visibilities(m, tritter(), c.params.integer("sweep_points"));
  const std::vector<std::pair<std::string, double>> rows{
      {"hom", v.hom}, {"mercedes", v.mercedes}, {"suppressed_210", v.suppressed_210}, {"triad_dip", v.triad_dip}};
  Series s{"visibility", {}, {}};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    o.table.add({rows[k].first, rows[k].second});
    s.x.push_back(static_cast<double>(k));
    s.y.push_back(rows[k].second);
    o.summary[rows[k].first] = rows[k].second;
  }
  o.svg = cli::line_plot({s}, "hom, mercedes, suppressed_210, triad_dip", "visibility", true);
  return o;
}

Outcome run_lattice_spectrum(const Context& c) {
  Outcome o;
  o.table.columns = {"index", "energy"};
  const auto v = vortex_setup(c);
  const Vec2 centre = v.base.sites[lattice::bright_site(v.base, Vec2(c.params.num("center_x"), c.params.num("center_y")))];
  const RMatrix h = c.params.flag("vortex") ? v.hamiltonian({{centre, 1}}) : lattice::coupling_hamiltonian(v.base, v.model);
  const RVector e = Eigen::SelfAdjointEigenSolver<RMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  Series s{"energy", {}, {}};
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    o.table.add({static_cast<long long>(k), e[k]});
    s.x.push_back(static_cast<double>(k));
    s.y.push_back(e[k]);
  }
  o.summary["sites"] = v.base.size();
  o.summary["gap_edge"] = lattice::gap_edge(e, v.zero_threshold);
  o.summary["near_zero_count"] = (e.array().abs() < v.zero_threshold).count();
  o.svg = cli::line_plot({s}, "eigenvalue index", "energy (1/cm)", true);
  return o;
}

Outcome run_zero_mode(const Context& c) {
  Outcome o;
  o.table.columns = {"site", "x", "y", "sublattice", "intensity"};
  const auto v = vortex_setup(c);
  const int bright = lattice::bright_site(v.base, Vec2(c.params.num("center_x"), c.params.num("center_y")));
  const std::vector<lattice::VortexCore> cores{{v.base.sites[bright], 1}};
  const auto sp = lattice::spectrum(v.hamiltonian(cores));
  const auto lm = lattice::localized_zero_mode(sp, v.base, cores[0].center, 2 * v.l0, v.zero_threshold);
  std::vector<double> xs, ys, in;
  for (std::size_t k = 0; k < v.base.size(); ++k) {
    const double p = lm.mode[static_cast<Eigen::Index>(k)] * lm.mode[static_cast<Eigen::Index>(k)];
    o.table.add({static_cast<long long>(k), v.base.sites[k].x(), v.base.sites[k].y(),
                 std::string(v.base.sublattice[k] == lattice::Sublattice::A ? "A" : "B"), p});
    xs.push_back(v.base.sites[k].x()), ys.push_back(v.base.sites[k].y()), in.push_back(p);
  }
  Table eig;
  eig.columns = {"index", "energy"};
  for (Eigen::Index k = 0; k < sp.values.size(); ++k) eig.add({static_cast<long long>(k), sp.values[k]});
  o.extra["eigenvalues.csv"] = eig;
  const double gab = lattice::sublattice_ratio(lm.mode, v.base);
  o.summary["sites"] = v.base.size();
  o.summary["energy"] = lm.energy;
  o.summary["gap_edge"] = lattice::gap_edge(sp.values, v.zero_threshold);
  o.summary["gamma_AB"] = gab;
  o.summary["weight_within_2l0"] = lattice::weight_within(lm.mode, v.base, cores[0].center, 2 * v.l0);
  o.summary["center_hexagon_ratio"] = lattice::center_hexagon_ratio(lm.mode, v.base, bright);
  o.summary["analytic_overlap"] = std::abs(lattice::analytic_zero_mode(v.base, v.field(cores), v.model).dot(lm.mode));
  o.summary["interior_zero_modes"] = lattice::interior_zero_mode_count(sp, v.base, v.zero_threshold, 30.0);
  char title[96];
  std::snprintf(title, sizeof title, "zero mode intensity, gamma_AB = %.3g", gab);
  o.svg = cli::site_heatmap(xs, ys, in, title);
  return o;
}

Outcome run_translate(const Context& c) {
  Outcome o;
  o.table.columns = {"length_cm", "steps", "fidelity", "initial_overlap"};
  const auto v = vortex_setup(c);
  const Vec2 from(c.params.num("from_x"), c.params.num("from_y")), to(c.params.num("to_x"), c.params.num("to_y"));
  const int steps = c.params.integer("steps");
  for (double length : c.params.list("lengths")) {
    const auto r = lattice::translate_vortex(v, from, to, length, steps);
    o.table.add({length, static_cast<long long>(steps), r.fidelity, r.initial_overlap});
  }
  o.svg = cli::line_plot({series(o.table, "length_cm", "fidelity")}, "propagation length (cm)", "fidelity", true);
  return o;
}

Outcome run_disorder(const Context& c) {
  Outcome o;
  o.table.columns = {"rd", "mean_gamma_AB", "min_gamma_AB", "max_gamma_AB"};
  const auto v = vortex_setup(c);
  const Vec2 centre = v.base.sites[lattice::bright_site(v.base, Vec2(c.params.num("center_x"), c.params.num("center_y")))];
  const int seeds = c.params.integer("seeds");
  if (seeds < 1) throw config_error("config: seeds must be positive");
  for (double rd : c.params.list("rd")) {
    double sum = 0, lo = INFINITY, hi = 0;
    for (int s = 0; s < seeds; ++s) {
      const double g = lattice::disorder_sublattice_ratio(v, centre, rd, c.seed + static_cast<std::uint64_t>(s),
                                                          c.params.num("length"));
      sum += g, lo = std::min(lo, g), hi = std::max(hi, g);
    }
    o.table.add({rd, sum / seeds, lo, hi});
  }
  o.svg = cli::line_plot({series(o.table, "rd", "mean_gamma_AB"), series(o.table, "rd", "min_gamma_AB")},
                         "disorder radius r_d (um)", "gamma_AB", true);
  return o;
}

Outcome run_braid(const Context& c) {
  Outcome o;
  o.table.columns = {"run", "phase_left", "phase_right", "relative_phase", "fidelity_left", "fidelity_right", "step_change"};
  const auto v = vortex_setup(c);
  const Vec2 l(c.params.num("left_x"), c.params.num("left_y")), r(c.params.num("right_x"), c.params.num("right_y"));
  const double length = c.params.num("length");
  const int steps = c.params.integer("steps");
  const auto swap = lattice::braid(v, l, r, length, steps, true, c.params.flag("check_convergence"));
  const auto hold = lattice::braid(v, l, r, length, steps, false);
  for (const auto& [name, b] : {std::pair{"exchange", swap}, std::pair{"control", hold}})
    o.table.add({std::string(name), b.phase_left, b.phase_right, b.relative_phase, b.fidelity_left, b.fidelity_right,
                 b.step_change});
  o.summary["converged"] = swap.converged;
  Series ph{"exchange phases", {0, 1}, {swap.phase_left, swap.phase_right}};
  Series ct{"control phases", {0, 1}, {hold.phase_left, hold.phase_right}};
  o.svg = cli::line_plot({ph, ct}, "mode (0 = left, 1 = right)", "acquired phase (rad)", true);
  return o;
}

Outcome run_winding(const Context& c) {
  Outcome o;
  o.table.columns = {"t_l", "t_r", "winding", "gap"};
  const double tr = c.params.num("t_r");
  int skipped = 0;
  for (double tl : linspace(c.params.num("t_l_min"), c.params.num("t_l_max"), c.params.integer("points"))) {
    try {
      const auto w = lattice::winding_number(lattice::ssh_loop(tl, tr, c.params.integer("samples")));
      o.table.add({tl, tr, static_cast<long long>(w.value), lattice::ssh_energy(pi, tl, tr)});
    } catch (const gap_closed_error&) {
      ++skipped;
    }
  }
  o.summary["gap_closed_points_skipped"] = skipped;
  o.svg = cli::line_plot({series(o.table, "t_l", "winding"), series(o.table, "t_l", "gap")}, "t_L / t_R", "value", true);
  return o;
}

Outcome run_chern(const Context& c) {
  Outcome o;
  o.table.columns = {"m", "chern", "residue"};
  int skipped = 0;
  for (double m : linspace(c.params.num("m_min"), c.params.num("m_max"), c.params.integer("points"))) {
    try {
      const auto ch = lattice::chern_number(lattice::two_band_model(m), 0, c.params.integer("grid"));
      o.table.add({m, static_cast<long long>(ch.value), ch.residue});
    } catch (const gap_closed_error&) {
      ++skipped;
    }
  }
  o.summary["gap_closed_points_skipped"] = skipped;
  o.svg = cli::line_plot({series(o.table, "m", "chern")}, "mass m", "Chern number (lower band)", true);
  return o;
}

Outcome run_characterize(const Context& c) {
  Outcome o;
  o.table.columns = {"noise", "trial", "fidelity"};
  std::mt19937_64 rng(c.seed);
  const int modes = c.params.integer("modes"), trials = c.params.integer("trials"), samples = c.params.integer("samples");
  std::vector<Series> s;
  for (double noise : c.params.list("noise")) {
    Series line{"noise " + cli::format_number(noise), {}, {}};
    for (int t = 0; t < trials; ++t) {
      const CMatrix u = random_unitary(modes, rng);
      const auto d = synthesize_fringes(u, samples, 1.0, noise, rng);
      const double f = gauge_fidelity(characterize_from_fringes(d).unitary.matrix, u);
      o.table.add({noise, static_cast<long long>(t), f});
      line.x.push_back(t), line.y.push_back(f);
    }
    s.push_back(line);
  }
  o.svg = cli::line_plot(s, "trial", "gauge-fixed fidelity", true);
  return o;
}

Outcome run_validate(const Context& c) {
  Outcome o;
  o.table.columns = {"check", "value", "threshold", "pass"};
  auto check = [&](const std::string& name, double value, double threshold, bool pass) {
    o.table.add({name, value, threshold, static_cast<long long>(pass)});
    o.valid = o.valid && pass;
  };
  std::mt19937_64 rng(c.seed);
  const double tol = c.params.num("tolerance");
  double worst = 0.0;
  int configs = 0;
  while (configs < c.params.integer("oracle_trials")) {
    const int m = std::uniform_int_distribution<int>(2, 4)(rng);
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    const auto basis = InternalBasis::generic(std::uniform_int_distribution<int>(1, 3)(rng));
    if (std::pow(m * basis->dim(), n) > 20000) continue;
    const CMatrix u = random_unitary(m, rng);
    std::vector<Photon> photons;
    for (int k = 0; k < n; ++k)
      photons.push_back({std::uniform_int_distribution<int>(0, m - 1)(rng), InternalState::random(basis, rng)});
    const auto stats = static_cast<Statistics>(configs % 3);
    for (const auto& s : all_patterns(m, n))
      worst = std::max(worst, std::abs(event_probability(u, photons, s, stats) -
                                       oracle::brute_force_probability(u, photons, s, stats)));
    ++configs;
  }
  check("oracle_equivalence_max_diff", worst, tol, worst < tol);

  double sum_err = 0.0;
  for (auto stats : {Statistics::boson, Statistics::fermion, Statistics::classical}) {
    const auto basis = InternalBasis::generic(2);
    std::vector<InternalState> st;
    for (int k = 0; k < 3; ++k) st.push_back(InternalState::random(basis, rng));
    const CMatrix u = random_unitary(3, rng);
    double total = 0.0;
    for (const auto& s : all_patterns(3, 3)) total += event_probability(u, st, {1, 1, 1}, s, stats);
    sum_err = std::max(sum_err, std::abs(total - 1.0));
  }
  check("probability_sum_deviation", sum_err, 1e-12, sum_err < 1e-12);

  const double hom = event_probability(beamsplitter(), pair_states(0.0, 1.0), {1, 1}, {1, 1});
  check("hom_zero_delay", hom, 1e-15, std::abs(hom) < 1e-15);
  const double w0 = w_shape_scan({0.0})[0];
  check("w_shape_zero_delay_deviation", std::abs(w0 - 1.0 / 3.0), 1e-12, std::abs(w0 - 1.0 / 3.0) < 1e-12);
  const auto pts = triad_sweep(linspace(0.0, pi / 2, 17));
  double drift = 0.0;
  for (const auto& p : pts)
    drift = std::max({drift, std::abs(p.p011 - pts[0].p011), std::abs(p.p101 - pts[0].p101), std::abs(p.p110 - pts[0].p110)});
  check("triad_two_fold_drift", drift, 1e-12, drift < 1e-12);
  const int w_top = lattice::winding_number(lattice::ssh_loop(1.0, 0.5)).value;
  const int w_triv = lattice::winding_number(lattice::ssh_loop(0.5, 1.0)).value;
  check("ssh_winding_topological", w_top, 1, std::abs(w_top) == 1);
  check("ssh_winding_trivial", w_triv, 0, w_triv == 0);
  const auto ch = lattice::chern_number(lattice::two_band_model(1.0), 0);
  check("chern_residue", ch.residue, 0.01, std::abs(ch.value) == 1 && ch.residue < 0.01);
  const CMatrix qt = quitter(pi / 2);
  check("quitter_unitarity", unitarity_residual(qt), 1e-12, unitarity_residual(qt) < 1e-12);

  int failed = 0;
  for (const auto& r : o.table.rows) failed += std::get<long long>(r[3]) == 0;
  o.summary["checks"] = o.table.rows.size();
  o.summary["failed"] = failed;
  Series s{"value / threshold", {}, {}};
  for (std::size_t k = 0; k < o.table.rows.size(); ++k) {
    const double v = std::abs(std::get<double>(o.table.rows[k][1])), t = std::get<double>(o.table.rows[k][2]);
    s.x.push_back(static_cast<double>(k));
    s.y.push_back(t > 0 ? v / t : v);
  }
  o.svg = cli::line_plot({s}, "check index", "value / threshold", true);
  return o;
}

std::vector<Scenario> scenarios() {
  const json lattice_defaults = {{"delta0", 3.0}, {"l0", 20.0}, {"center_x", 0.0}, {"center_y", 0.0}};
  auto with = [](json base, const json& more) {
    base.update(more);
    return base;
  };
  return {
      {"hom", "Two-photon HOM delay scan on a balanced beam splitter", {"tau", "P11_boson", "P11_fermion", "P11_classical"},
       {{"tau_min", -4.0}, {"tau_max", 4.0}, {"points", 161}, {"sigma", 1.0}}, "", run_hom},
      {"w-shape", "Three-photon tritter scan of P(1,1,1), identical polarizations", {"tau", "P111"},
       {{"tau_min", -6.0}, {"tau_max", 6.0}, {"points", 241}, {"sigma", 1.0}}, "",
       [](const Context& c) { return run_three_photon(c, false); }},
      {"mercedes", "Three-photon tritter scan of P(1,1,1), Mercedes-star polarizations", {"tau", "P111"},
       {{"tau_min", -6.0}, {"tau_max", 6.0}, {"points", 241}, {"sigma", 1.0}}, "",
       [](const Context& c) { return run_three_photon(c, true); }},
      {"triad-sweep", "Triad-phase sweep at constant pairwise overlaps",
       {"theta", "triad_phase", "P111", "P011", "P101", "P110"}, {{"points", 33}, {"sigma", 1.0}}, "", run_triad_sweep},
      {"circle-dance", "Four-photon fringe on the quitter versus the cyclic phase", {"theta", "P5678", "P5678_formula"},
       {{"residual", 0.1}, {"width_ratio", 2.2}, {"sigma", 1.0}, {"chi", pi / 2}, {"points", 73}}, "", run_circle_dance},
      {"locking", "Two-fold locking signal on the quitter versus chi", {"chi", "P_engine", "P_formula"},
       {{"r", 1.0}, {"points", 73}}, "", run_locking},
      {"ghz", "GHZ interferometer full-event probabilities versus phase", {"phase", "P_full_k0", "P_full_k1"},
       {{"n", 4}, {"points", 73}}, "", run_ghz},
      {"noise-model", "Source and detector noise model visibilities on the tritter", {"quantity", "visibility"},
       {{"lambda", 0.16}, {"purity", 0.9}, {"p_idler_noise", 0.035}, {"p_signal_noise", 0.009}, {"max_photons", 8},
        {"max_noise", 3}, {"sweep_points", 9}},
       "", run_noise_model},
      {"lattice-spectrum", "Eigenvalues of the waveguide lattice, with or without a vortex", {"index", "energy"},
       with(lattice_defaults, {{"vortex", true}}), "disk-1192", run_lattice_spectrum},
      {"zero-mode", "Vortex zero mode intensity per site (eigenvalues in eigenvalues.csv)",
       {"site", "x", "y", "sublattice", "intensity"}, lattice_defaults, "disk-1192", run_zero_mode},
      {"translate", "Adiabatic vortex translation fidelity versus length",
       {"length_cm", "steps", "fidelity", "initial_overlap"},
       with(lattice_defaults, {{"from_x", -50.0}, {"from_y", -10.0}, {"to_x", 50.0}, {"to_y", -10.0},
                               {"lengths", {2.0, 4.0}}, {"steps", 40}}),
       "crop-400x300", run_translate},
      {"disorder-sweep", "Sublattice contrast of the injected zero mode under positional disorder",
       {"rd", "mean_gamma_AB", "min_gamma_AB", "max_gamma_AB"},
       with(lattice_defaults, {{"rd", {0.0, 0.2, 0.4, 0.6}}, {"seeds", 20}, {"length", 9.0}}), "disk-1192",
       run_disorder},
      {"braid", "Vortex exchange and static control: phases acquired by the two zero modes",
       {"run", "phase_left", "phase_right", "relative_phase", "fidelity_left", "fidelity_right", "step_change"},
       with(lattice_defaults, {{"left_x", -50.0}, {"left_y", -10.0}, {"right_x", 50.0}, {"right_y", -10.0},
                               {"length", 6.0}, {"steps", 160}, {"check_convergence", true}}),
       "disk-1192", run_braid},
      {"winding", "SSH winding number versus t_L at fixed t_R", {"t_l", "t_r", "winding", "gap"},
       {{"t_r", 1.0}, {"t_l_min", 0.0}, {"t_l_max", 2.0}, {"points", 41}, {"samples", 256}}, "", run_winding},
      {"chern", "Chern number of the two-band model versus mass", {"m", "chern", "residue"},
       {{"m_min", -3.0}, {"m_max", 3.0}, {"points", 25}, {"grid", 48}}, "", run_chern},
      {"characterize", "Round-trip reconstruction of random unitaries from intensity fringes",
       {"noise", "trial", "fidelity"}, {{"modes", 4}, {"trials", 5}, {"noise", {0.0, 0.01, 0.02}}, {"samples", 64}}, "",
       run_characterize},
      {"validate", "Oracle equivalence and invariant checks; exit 2 on any failure", {"check", "value", "threshold", "pass"},
       {{"oracle_trials", 80}, {"tolerance", 1e-9}}, "", run_validate},
  };
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw config_error("cannot read config file '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
}

int execute(const Scenario& sc, const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
            int threads, const std::string& preset_flag) {
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx{Params(sc.defaults), seed, threads, ""};
  ctx.params.overlay(read_config(config_path));
  if (!preset_flag.empty() && sc.default_preset.empty())
    throw config_error("--preset is not used by '" + sc.name + "'");
  ctx.preset = preset_flag.empty() ? sc.default_preset : preset_flag;
  if (!ctx.preset.empty()) preset_geometry(ctx.preset);
  if (threads < 1) throw config_error("--threads must be positive");
  Eigen::setNbThreads(threads);

  Outcome o = sc.run(ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  cli::write_atomic(dir / "results.csv", cli::to_csv(o.table));
  for (const auto& [name, table] : o.extra) cli::write_atomic(dir / name, cli::to_csv(table));
  cli::write_atomic(dir / "plot.svg", o.svg);
  json run{{"subcommand", sc.name},
           {"toolkit", "photonsim"},
           {"version", photonsim::version},
           {"config", ctx.params.all()},
           {"seed", seed},
           {"threads", threads},
           {"columns", sc.columns},
           {"summary", o.summary},
           {"status", o.valid ? "ok" : "validation_failed"},
           {"wall_time_s", wall}};
  if (!ctx.preset.empty()) run["preset"] = ctx.preset;
  cli::write_atomic(dir / "run.json", run.dump(2) + "\n");
  std::cout << sc.name << ": " << o.table.rows.size() << " rows written to " << out_dir << " (" << wall << " s)\n";
  if (!o.valid) {
    std::cerr << sc.name << ": validation failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photonsim: multiphoton interference and photonic lattice scenarios"};
  app.footer("Each subcommand writes results.csv, plot.svg and run.json into --out.\n"
             "Exit status: 0 success, 1 usage or config error, 2 validation failure.");
  app.set_version_flag("--version", photonsim::version);
  app.require_subcommand(0, 1);

  std::string config, out = "out", preset;
  std::uint64_t seed = 1;
  int threads = 1;
  const auto all = scenarios();
  std::vector<CLI::App*> subs;
  for (const auto& sc : all) {
    std::string cols;
    for (const auto& col : sc.columns) cols += (cols.empty() ? "" : ",") + col;
    auto* sub = app.add_subcommand(sc.name, sc.description + ". CSV columns: " + cols);
    sub->add_option("--config", config, "JSON config file (schema 1); unknown keys are rejected");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads")->capture_default_str();
    if (!sc.default_preset.empty())
      sub->add_option("--preset", preset, "lattice preset: disk-1192, crop-400x300, disk-150")
          ->default_str(sc.default_preset);
    std::string keys;
    for (const auto& [k, v] : sc.defaults.items()) keys += "  " + k + " = " + v.dump() + "\n";
    sub->footer("CSV columns: " + cols + "\nConfig keys and defaults:\n" + keys);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    std::cerr << "error: unknown subcommand or argument: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    try {
      return execute(all[k], config, out, seed, threads, preset);
    } catch (const config_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const photonsim::error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  std::cerr << "error: missing subcommand (see --help)\n";
  return 1;
}
