#include "revival/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "revival/angular.hpp"
#include "revival/certify.hpp"
#include "revival/coincidence.hpp"
#include "revival/config.hpp"
#include "revival/errors.hpp"
#include "revival/frames.hpp"
#include "revival/oam.hpp"
#include "revival/optics.hpp"
#include "revival/turbulence.hpp"

namespace revival::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out_dir = ".";
  int workers = -1;
  double z_mm = -1.0;
  std::string basis = "angle";
  bool turbulent = false;
  long frames = -1;
  std::string stack_path;
  std::string mode = "both";
};

struct Run {
  std::string command;
  Options opt;
  Config cfg;
  std::vector<std::string> outputs;
  std::ostream& out;

  ExperimentParams params() const {
    return derive_params(cfg.number("w0_um") * 1e-6, cfg.number("L_mm") * 1e-3,
                         cfg.number("lambda_p_nm") * 1e-9);
  }
  unsigned workers() const {
    if (opt.workers >= 0) return static_cast<unsigned>(opt.workers);
    return static_cast<unsigned>(cfg.number_or("workers", 1));
  }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(cfg.number_or("seed", 1)); }
  double z() const {
    const double mm = opt.z_mm >= 0.0 ? opt.z_mm : cfg.number("z_mm");
    if (mm < 0.0) throw DomainError("z must be >= 0");
    return mm * 1e-3;
  }
  AngleQuadrature angle_quad() const {
    AngleQuadrature q;
    q.n_theta = static_cast<std::size_t>(cfg.number_or("n_theta", 256));
    q.n_radial = static_cast<std::size_t>(cfg.number_or("n_radial", 256));
    q.workers = workers();
    return q;
  }
  EprSettings epr_settings() const {
    EprSettings s;
    s.angle = angle_quad();
    s.sampling.n_theta = s.angle.n_theta;
    s.sampling.ensemble = static_cast<std::size_t>(cfg.number_or("ensemble", 20000));
    s.sampling.seed = seed();
    s.sampling.workers = workers();
    return s;
  }
  TurbulenceParams turbulence() const {
    return make_turbulence(params(), cfg.number("d_cm") * 1e-2, cfg.number("r_mm") * 1e-3,
                           cfg.number_or("sigma_r_mm", 0.0) * 1e-3);
  }
  std::vector<double> z_grid() const {
    const auto points = static_cast<std::size_t>(cfg.number_or("z_points", 40));
    return log_spaced(cfg.number("z_min_cm") * 1e-2, cfg.number("z_max_cm") * 1e-2, points);
  }
  std::ofstream artifact(const std::string& name) {
    fs::create_directories(opt.out_dir);
    const fs::path path = fs::path(opt.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f.precision(17);
    outputs.push_back(path.string());
    return f;
  }
  void manifest() {
    fs::create_directories(opt.out_dir);
    std::ofstream f(fs::path(opt.out_dir) / "manifest.txt");
    f << "command=" << command << "\nversion=0.1.0\n";
    f << "config_file=" << opt.config << '\n';
    for (const auto& [k, v] : cfg.entries()) f << "config." << k << '=' << v << '\n';
    f << "seed=" << seed() << "\nworkers=" << workers() << '\n';
    if (opt.z_mm >= 0.0) f << "z_mm=" << opt.z_mm << '\n';
    for (std::size_t i = 0; i < outputs.size(); ++i) f << "output." << i << '=' << outputs[i] << '\n';
  }
};

void cmd_params(Run& run) {
  const ExperimentParams p = run.params();
  auto f = run.artifact("params.csv");
  const double dp = conditional_momentum_sigma(p).value;
  f << "name,value\n"
    << "w0_m," << p.w0 << "\nL_m," << p.L << "\nlambda_p_m," << p.lambda_p << "\nk_per_m," << p.k
    << "\nsigma0_m," << p.sigma0 << "\ncrossover_m," << crossover_distance(p)
    << "\ndelta_p_hbar_per_mm," << dp * 1e-3 << '\n';
  run.out << "k = " << p.k << " 1/m\nsigma0 = " << p.sigma0 * 1e6 << " um\n"
          << "delta_p = " << dp * 1e-3 << " hbar/mm\n";
  if (p.narrow_pump()) run.out << "warning: w0 < 10 sigma0, asymptotic laws are inaccurate\n";
}

void cmd_position_dist(Run& run) {
  const JointDistribution2D d = joint_position_pd(run.params(), run.z());
  auto f = run.artifact("position_dist.csv");
  write_csv(f, d);
}

void cmd_angle_dist(Run& run) {
  const PolarJointPD pd = joint_angle_pd_quadrature(run.params(), run.z(), run.angle_quad());
  auto f = run.artifact("angle_dist.csv");
  write_csv(f, pd.to_distribution());
  run.out << "peak offset = " << pd.peak_offset() << " rad\n";
}

void cmd_uncertainty_scan(Run& run) {
  const ExperimentParams p = run.params();
  auto f = run.artifact("uncertainty_scan.csv");
  if (run.opt.basis == "position") {
    f << "z,sigma,regime\n";
    for (double z : run.z_grid()) {
      const RegimeApproximation r = position_scaling_regime(p, z);
      const char* name = r.regime == PositionRegime::near ? "near"
                         : r.regime == PositionRegime::far ? "far" : "crossover";
      f << z << ',' << conditional_position_sigma(p, z).value << ',' << name << '\n';
    }
  } else {
    f << "z,sigma,fwhm,fwhm_saturated\n";
    for (double z : run.z_grid()) {
      const auto s = conditional_angle_sigma(p, z, AngleSigmaMethod::stddev_quadrature, run.angle_quad());
      const auto w = conditional_angle_sigma(p, z, AngleSigmaMethod::fwhm_closed_form);
      f << z << ',' << s.value << ',' << w.value << ',' << (w.saturated ? 1 : 0) << '\n';
    }
  }
}

void cmd_epr_scan(Run& run) {
  const ExperimentParams p = run.params();
  const EprSettings settings = run.epr_settings();
  auto f = run.artifact("epr_scan.csv");
  if (run.opt.basis == "position") {
    const double dp = run.cfg.number("delta_p_per_mm") * 1e3;
    f << "z,sigma,product,entangled\n";
    for (double z : run.z_grid()) {
      const EprProduct e = epr_product(Basis::position_momentum, p, z, dp);
      f << z << ',' << e.first.value << ',' << e.product << ',' << e.entangled << '\n';
    }
  } else {
    const double dl = run.cfg.number("delta_l");
    f << "z,sigma,product,entangled\n";
    for (double z : run.z_grid()) {
      const EprProduct e = epr_product(Basis::angle_oam, p, z, dl, std::nullopt, settings);
      f << z << ',' << e.first.value << ',' << e.product << ',' << e.entangled << '\n';
    }
  }
}

void report_scan(Run& run, const ScanResult& r, const std::string& name) {
  auto f = run.artifact(name + ".csv");
  f << "z,product\n";
  for (std::size_t i = 0; i < r.z.size(); ++i) f << r.z[i] << ',' << r.product[i] << '\n';
  auto c = run.artifact(name + "_crossings.csv");
  c << "kind,z\n";
  run.out << "kind      z_cm\n";
  for (const Crossing& x : r.crossings) {
    const char* kind = x.kind == CrossingKind::loss ? "loss" : "revival";
    c << kind << ',' << x.z << '\n';
    run.out << std::left << std::setw(10) << kind << std::fixed << std::setprecision(1)
            << x.z * 100.0 << '\n';
  }
  if (r.crossings.empty()) run.out << "no crossing in range\n";
}

void cmd_revival(Run& run) {
  const ExperimentParams p = run.params();
  const EprSettings settings = run.epr_settings();
  std::optional<TurbulenceParams> turb;
  double dl = 0.0;
  if (run.opt.turbulent) {
    turb = run.turbulence();
    dl = run.cfg.number("delta_l_turb");
  } else {
    dl = run.cfg.number("delta_l");
  }
  const ScanResult r = find_revival(p, turb, dl, run.cfg.number("z_min_cm") * 1e-2,
                                    run.cfg.number("z_max_cm") * 1e-2,
                                    static_cast<std::size_t>(run.cfg.number_or("z_points", 40)),
                                    settings, run.workers());
  report_scan(run, r, "revival");
}

void cmd_turbulence_scan(Run& run) {
  const ExperimentParams p = run.params();
  const TurbulenceParams turb = run.turbulence();
  const double dl = run.cfg.number("delta_l_turb");
  const EprSettings settings = run.epr_settings();
  auto f = run.artifact("turbulence_scan.csv");
  f << "z,delta_theta_sigma,product\n";
  for (double z : run.z_grid()) {
    const EprProduct e = epr_product(Basis::angle_oam, p, z, dl, turb, settings);
    f << z << ',' << e.first.value << ',' << e.product << '\n';
  }
}

void cmd_oam_spectrum(Run& run) {
  const TurbulenceParams turb = run.turbulence();
  const OamDistribution d = oam_spectrum_turbulent(turb, run.z());
  auto f = run.artifact("oam_spectrum.csv");
  write_csv(f, d);
  const OamFit fit = fit_oam_model(d, OamForm::exp_gaussian);
  run.out << "a = " << fit.model.a << "\nb = " << fit.model.b << "\nN = " << fit.model.N
          << "\nsigma_f = " << fit.model.sigma_f
          << "\nuncertainty = " << oam_uncertainty(d).value << " hbar\n";
}

FrameGeometry geometry_from(const Config& cfg) {
  FrameGeometry g;
  g.width = static_cast<std::uint32_t>(cfg.number_or("width", 512));
  g.height = static_cast<std::uint32_t>(cfg.number_or("height", 512));
  g.pixel_pitch = cfg.number_or("pixel_um", 16) * 1e-6;
  g.magnification = cfg.number_or("magnification", 1);
  return g;
}

void cmd_frames_gen(Run& run) {
  const ExperimentParams p = run.params();
  FrameSettings s;
  const double frames = run.opt.frames >= 0 ? static_cast<double>(run.opt.frames)
                                            : run.cfg.number_or("frames", 1000);
  if (frames < 1) throw DomainError("frames must be >= 1");
  s.frames = static_cast<std::size_t>(frames);
  s.pair_rate = run.cfg.number_or("pair_rate", 20);
  s.background_rate = run.cfg.number_or("background_rate", 0.0);
  s.qe = run.cfg.number_or("qe", 1.0);
  s.seed = run.seed();
  s.z = run.z();
  s.workers = run.workers();
  const PairSampler sampler =
      run.opt.turbulent ? PairSampler::turbulent(p, run.cfg.number("d_cm") * 1e-2,
                                                 run.cfg.number("r_mm") * 1e-3, s.z)
                        : PairSampler::clean(p, s.z);
  const FrameStack stack = generate_frames(sampler, geometry_from(run.cfg), s);
  const fs::path path = run.opt.stack_path.empty() ? fs::path(run.opt.out_dir) / "frames.spdc"
                                                   : fs::path(run.opt.stack_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_stack(stack, path);
  run.outputs.push_back(path.string());
  run.out << "wrote " << stack.frame_count() << " frames to " << path.string() << '\n';
}

void cmd_frames_analyze(Run& run) {
  if (run.opt.stack_path.empty()) throw ConfigError("--input is required");
  const FrameStack stack = read_stack(fs::path(run.opt.stack_path));
  if (run.opt.mode == "strips" || run.opt.mode == "both") {
    const auto strip = static_cast<std::uint32_t>(run.cfg.number_or("strip_height", 4));
    const CoincidenceMap map = coincidence_strips(stack, strip);
    auto f = run.artifact("strip_map.csv");
    write_csv(f, map);
    const PositionFit fit = fit_position_map(map);
    run.out << "position: sigma1 = " << fit.params.sigma1 << " m, sigma2 = " << fit.params.sigma2
            << " m, delta = " << fit.estimate.value << " m\n";
  }
  if (run.opt.mode == "sectors" || run.opt.mode == "both") {
    const auto n = static_cast<std::size_t>(run.cfg.number_or("sectors", 36));
    const FrameGeometry& g = stack.geometry();
    const CoincidenceMap map = coincidence_sectors(stack, n, g.center_x(), g.center_y());
    auto f = run.artifact("sector_map.csv");
    write_csv(f, map);
    const AngleFit fit = fit_angle_map(map);
    run.out << "angle: q = " << fit.params.q << ", c = " << fit.params.c
            << ", delta = " << fit.estimate.value << " rad\n";
  }
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Biphoton correlation propagation and EPR certification"};
  app.require_subcommand(1);
  Options opt;
  const auto common = [&opt](CLI::App* sub, bool needs_z) {
    sub->add_option("--config", opt.config, "key=value configuration file")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--workers", opt.workers, "worker threads");
    if (needs_z) sub->add_option("--z-mm", opt.z_mm, "propagation distance in mm");
  };
  auto* params = app.add_subcommand("params", "derived constants");
  common(params, false);
  auto* position = app.add_subcommand("position-dist", "joint position distribution");
  common(position, true);
  auto* angle = app.add_subcommand("angle-dist", "joint angle distribution");
  common(angle, true);
  auto* uscan = app.add_subcommand("uncertainty-scan", "conditional uncertainty versus z");
  common(uscan, false);
  uscan->add_option("--basis", opt.basis)->check(CLI::IsMember({"position", "angle"}));
  auto* escan = app.add_subcommand("epr-scan", "EPR product versus z");
  common(escan, false);
  escan->add_option("--basis", opt.basis)->check(CLI::IsMember({"position", "angle"}));
  auto* revival = app.add_subcommand("revival", "entanglement loss and revival distances");
  common(revival, false);
  revival->add_flag("--turbulent", opt.turbulent, "include the turbulence plane");
  auto* tscan = app.add_subcommand("turbulence-scan", "angle uncertainty beyond the turbulence plane");
  common(tscan, false);
  auto* oam = app.add_subcommand("oam-spectrum", "signal OAM spectrum beyond the turbulence plane");
  common(oam, true);
  auto* frames = app.add_subcommand("frames", "synthetic frame stacks");
  frames->require_subcommand(1);
  auto* gen = frames->add_subcommand("gen", "generate a frame stack");
  common(gen, true);
  gen->add_option("--frames", opt.frames, "number of frames");
  gen->add_option("--output", opt.stack_path, "stack file");
  gen->add_flag("--turbulent", opt.turbulent, "include the turbulence plane");
  auto* analyze = frames->add_subcommand("analyze", "coincidence maps and fits");
  common(analyze, false);
  analyze->add_option("--input", opt.stack_path, "stack file")->required();
  analyze->add_option("--mode", opt.mode)->check(CLI::IsMember({"strips", "sectors", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const std::vector<std::pair<CLI::App*, void (*)(Run&)>> table{
      {params, cmd_params},          {position, cmd_position_dist},
      {angle, cmd_angle_dist},       {uscan, cmd_uncertainty_scan},
      {escan, cmd_epr_scan},         {revival, cmd_revival},
      {tscan, cmd_turbulence_scan},  {oam, cmd_oam_spectrum},
      {gen, cmd_frames_gen},         {analyze, cmd_frames_analyze}};
  try {
    for (const auto& [sub, fn] : table) {
      if (!sub->parsed()) continue;
      Run r{sub == gen ? "frames gen" : sub == analyze ? "frames analyze" : sub->get_name(),
            opt, Config::load(opt.config), {}, out};
      fn(r);
      r.manifest();
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace revival::cli
