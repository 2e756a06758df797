#include "chatter/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>

#include "chatter/charroots.hpp"
#include "chatter/errors.hpp"
#include "chatter/lobes_delayed.hpp"
#include "chatter/lobes_instant.hpp"
#include "chatter/output.hpp"
#include "chatter/params.hpp"
#include "chatter/simulate.hpp"

namespace chatter::cli {

namespace {

struct Preset {
  Variant variant;
  double xi;
  double q;
  int n_max;
  PlotAxes axes;
};

std::optional<Preset> find_preset(const std::string& name) {
  if (name == "fig4") return Preset{Variant::Delayed, 0.2, 12.0, 3, {-2, 42, -5, 20}};
  if (name == "fig6") return Preset{Variant::Delayed, 0.2, 0.8, 3, {-2, 41, -1, 20}};
  if (name == "fig7") return Preset{Variant::Instant, 0.2, 0.8, 3, {-2, 42, -1, 10}};
  if (name == "fig8") return Preset{Variant::Instant, 1.62, 0.8, 3, {-6, 360, -0.1, 1.5}};
  return std::nullopt;
}

struct RunConfig {
  std::string variant = "delayed";
  std::optional<double> xi;
  std::optional<double> q;
  std::string params_file;
  std::string preset;
  int n_max = 3;
  int samples = 256;
  std::optional<double> delta;
  std::optional<double> h;
  std::string out_path;
  std::string svg_path;
  double eta_end = 60.0;
  double step = 0.01;
  double amplitude = 1e-6;
  int root_count = 6;
};

// Usage errors detected after parsing.
struct UsageError : DomainError {
  using DomainError::DomainError;
};

struct Resolved {
  Variant variant;
  double xi;
  double q;
  std::optional<PhysicalParams> phys;
  std::optional<DimensionlessParams> dim;
  std::optional<Preset> preset;
};

Resolved resolve(const RunConfig& cfg, bool need_xi_q) {
  Resolved r{parse_variant(cfg.variant), 0.0, 0.75, std::nullopt, std::nullopt, std::nullopt};
  const bool has_pair = cfg.xi.has_value();
  const bool has_file = !cfg.params_file.empty();
  if (!cfg.preset.empty()) {
    r.preset = find_preset(cfg.preset);
    if (!r.preset) throw UsageError("unknown preset '" + cfg.preset + "'");
    if (has_pair || has_file) throw UsageError("--preset excludes --xi and --params");
    r.variant = r.preset->variant;
    r.xi = r.preset->xi;
    r.q = r.preset->q;
    return r;
  }
  if (has_pair == has_file) {
    if (!need_xi_q && !has_pair && !has_file) return r;
    throw UsageError("give exactly one of --xi/--q or --params");
  }
  if (has_file) {
    if (cfg.q) throw UsageError("--q is read from the parameter file");
    r.phys = load_params(cfg.params_file);
    r.dim = reduce(*r.phys);
    r.xi = r.dim->xi;
    r.q = r.dim->q;
  } else {
    r.xi = *cfg.xi;
    r.q = cfg.q.value_or(0.75);
  }
  return r;
}

CharParams char_params(const RunConfig& cfg, const Resolved& r) {
  CharParams p{r.variant, r.xi, 0.0, 0.0, r.q, 1.0};
  if (r.phys) require_symmetric_tool(*r.phys);
  if (cfg.delta) {
    p.delta = *cfg.delta;
  } else if (r.dim) {
    p.delta = r.dim->delta;
  } else {
    throw UsageError("--delta is required");
  }
  if (cfg.h) {
    p.h = *cfg.h;
  } else if (r.dim) {
    p.h = r.variant == Variant::Delayed ? r.dim->h1 : r.dim->h2;
  } else {
    throw UsageError("--h is required");
  }
  validate(p);
  return p;
}

// Writes through `body` to --out when given, else to stdout.
template <class Body>
void emit(const std::string& path, std::ostream& out, Body body) {
  if (path.empty() || path == "-") {
    body(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  body(f);
  if (!f) throw std::ios_base::failure("write to '" + path + "' failed");
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
  if (cfg.params_file.empty()) throw UsageError("reduce needs --params");
  const auto d = reduce(load_params(cfg.params_file));
  emit(cfg.out_path, out, [&](std::ostream& o) {
    o << std::setprecision(17);
    o << "xi=" << d.xi << "\ndelta=" << d.delta << "\nh1=" << d.h1 << "\nh2=" << d.h2
      << "\nk_star=" << d.k_star << "\np=" << d.p << "\nK1=" << d.K1 << "\nk_r=" << d.k_r
      << "\nc_gain=" << d.c_gain << "\nq=" << d.q << '\n';
  });
  return kOk;
}

PlotAxes auto_axes(const std::vector<BoundaryBranch>& branches) {
  PlotAxes ax{0.0, 1.0, 0.0, 1.0};
  bool first = true;
  for (const auto& br : branches) {
    for (const auto& p : br.points) {
      if (first) {
        ax = {p.delta, p.delta, p.h, p.h};
        first = false;
      }
      ax.x_max = std::max(ax.x_max, p.delta);
      ax.y_min = std::min(ax.y_min, p.h);
      ax.y_max = std::max(ax.y_max, p.h);
    }
  }
  // Branches run off to infinity near their poles; cap the default view.
  ax.x_min = 0.0;
  ax.x_max = std::min(ax.x_max, 50.0);
  ax.y_min = std::max(ax.y_min, -5.0);
  ax.y_max = std::min(ax.y_max, 20.0);
  if (ax.x_max <= ax.x_min) ax.x_max = ax.x_min + 1.0;
  if (ax.y_max <= ax.y_min) ax.y_max = ax.y_min + 1.0;
  return ax;
}

int cmd_lobes(const RunConfig& cfg, const Resolved& r, bool n_max_given, std::ostream& out) {
  const int n_max = (r.preset && !n_max_given) ? r.preset->n_max : cfg.n_max;
  if (n_max < 1) throw UsageError("--n-max must be >= 1");
  if (cfg.samples < 2) throw UsageError("--samples must be >= 2");
  std::vector<BoundaryBranch> all;
  for (int n = 1; n <= n_max; ++n) {
    auto part = r.variant == Variant::Delayed ? sample_branches_delayed(r.xi, r.q, n, cfg.samples)
                                              : sample_branches_instant(r.xi, r.q, n, cfg.samples);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  emit(cfg.out_path, out, [&](std::ostream& o) { write_lobes_csv(o, all); });
  if (!cfg.svg_path.empty()) {
    const PlotAxes ax = r.preset ? r.preset->axes : auto_axes(all);
    std::ostringstream title;
    title << to_string(r.variant) << " control, xi=" << r.xi << ", q=" << r.q;
    emit(cfg.svg_path, out, [&](std::ostream& o) { write_lobes_svg(o, all, ax, title.str()); });
  }
  return kOk;
}

int cmd_classify(const RunConfig& cfg, const Resolved& r, std::ostream& out) {
  const auto v = verdict(char_params(cfg, r));
  out << (v.stable ? "stable" : "unstable") << " unstable_count=" << v.unstable_count
      << " margin=" << std::setprecision(6) << v.margin << '\n';
  return v.stable ? kOk : kUnstable;
}

int cmd_roots(const RunConfig& cfg, const Resolved& r, std::ostream& out) {
  const CharParams p = char_params(cfg, r);
  const double R = rhp_root_radius(p);
  const double left = -std::max(1.0, p.xi);
  auto roots = roots_in_box(p, left - 0.0137, R + 1.0, -R - 1.0091, R + 1.0123);
  std::stable_sort(roots.begin(), roots.end(),
                   [](cplx a, cplx b) { return std::abs(a.real()) < std::abs(b.real()); });
  if (static_cast<int>(roots.size()) > cfg.root_count) roots.resize(cfg.root_count);
  emit(cfg.out_path, out, [&](std::ostream& o) {
    o << "re,im\n" << std::setprecision(17);
    for (const auto& z : roots) o << z.real() << ',' << z.imag() << '\n';
  });
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const Resolved& r, std::ostream& out) {
  Trajectory tr;
  if (r.phys && !cfg.delta && !cfg.h) {
    const double c = spindle_gain(*r.phys);
    const auto st = stationary_state(*r.phys, c);
    const double a = cfg.amplitude * st.r_star;
    const History hist = constant_history({st.r_star + a, st.rho_star + a, 0.0, 0.0});
    tr = integrate_nonlinear_transformed(r.variant, *r.phys, c, hist, cfg.eta_end, cfg.step);
  } else {
    const CharParams p = char_params(cfg, r);
    const double a = cfg.amplitude;
    tr = integrate_linear(linearize(p), constant_history({a, a, 0.0, 0.0}), cfg.eta_end,
                          cfg.step);
  }
  emit(cfg.out_path, out, [&](std::ostream& o) { write_trajectory_csv(o, tr); });
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool point) {
  sub->add_option("--variant", cfg.variant, "delayed or instant")
      ->check(CLI::IsMember({"delayed", "instant"}));
  sub->add_option("--xi", cfg.xi, "dimensionless damping xi");
  sub->add_option("--q", cfg.q, "cutting force exponent (default 0.75)");
  sub->add_option("--params", cfg.params_file, "physical parameter file (key=value)");
  sub->add_option("--preset", cfg.preset, "fig4, fig6, fig7 or fig8");
  sub->add_option("--out", cfg.out_path, "output path (default stdout)");
  if (point) {
    // -h is taken by the gain, so help is long-form only here.
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--delta", cfg.delta, "dimensionless stiffness delta");
    sub->add_option("--h", cfg.h, "control gain h1 (delayed) or h2 (instant)");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability lobes and verification for spindle-speed controlled turning"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* reduce_cmd = app.add_subcommand("reduce", "print dimensionless groups of a parameter file");
  reduce_cmd->add_option("--params", cfg.params_file, "physical parameter file")->required();
  reduce_cmd->add_option("--out", cfg.out_path, "output path (default stdout)");

  auto* lobes_cmd = app.add_subcommand("lobes", "sample stability boundary branches to CSV");
  add_common(lobes_cmd, cfg, false);
  auto* n_max_opt = lobes_cmd->add_option("--n-max", cfg.n_max, "highest lobe index");
  lobes_cmd->add_option("--samples", cfg.samples, "points per branch");
  lobes_cmd->add_option("--svg", cfg.svg_path, "also draw the branches as SVG");

  auto* classify_cmd = app.add_subcommand("classify", "stability verdict at a parameter point");
  add_common(classify_cmd, cfg, true);

  auto* roots_cmd = app.add_subcommand("roots", "characteristic roots nearest the imaginary axis");
  add_common(roots_cmd, cfg, true);
  roots_cmd->add_option("--count", cfg.root_count, "number of roots to print");

  auto* sim_cmd = app.add_subcommand("simulate", "integrate the delay system to CSV");
  add_common(sim_cmd, cfg, true);
  sim_cmd->add_option("--eta-end", cfg.eta_end, "run length in delay units");
  sim_cmd->add_option("--step", cfg.step, "step; must divide 1");
  sim_cmd->add_option("--amplitude", cfg.amplitude, "history offset from the stationary state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kDomainError;
  }

  try {
    if (reduce_cmd->parsed()) return cmd_reduce(cfg, out);
    if (lobes_cmd->parsed()) return cmd_lobes(cfg, resolve(cfg, true), n_max_opt->count() > 0, out);
    if (classify_cmd->parsed()) return cmd_classify(cfg, resolve(cfg, true), out);
    if (roots_cmd->parsed()) return cmd_roots(cfg, resolve(cfg, true), out);
    if (sim_cmd->parsed()) return cmd_simulate(cfg, resolve(cfg, true), out);
  } catch (const ContourTooClose& e) {
    err << "error: " << e.what() << "\nhint: the point sits on or near a stability boundary\n";
    return kContourTooClose;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ChatterError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kDomainError;
}

}  // namespace chatter::cli
