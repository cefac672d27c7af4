#include "cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cdkp/wronskian.hpp"

namespace cdkp::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

Range parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw UsageError("range must be lo:hi:step, got '" + s + "'");
  Range r;
  try {
    r.lo = std::stod(parts[0]);
    r.hi = std::stod(parts[1]);
    r.step = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("range must be numeric lo:hi:step, got '" + s + "'");
  }
  if (!(r.step > 0.0) || r.hi < r.lo) throw UsageError("range needs lo <= hi and step > 0, got '" + s + "'");
  return r;
}

std::string format_range(const Range& r) {
  return format_double(r.lo) + ":" + format_double(r.hi) + ":" + format_double(r.step);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

SolitonParams RunConfig::params() const {
  try {
    if (general()) {
      if (!z2 || !z3) throw UsageError("--z1, --z2 and --z3 must be given together");
      return SolitonParams::general(*z1, *z2, *z3, c1, c2, c3, k);
    }
    return SolitonParams::specialized(z, c, k, t3);
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid parameters: ") + e.what());
  }
}

Grid RunConfig::grid(std::vector<int> ns) const {
  return {std::move(ns), linspace_step(x_range.lo, x_range.hi, x_range.step),
          linspace_step(y_range.lo, y_range.hi, y_range.step), t3};
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["command"] = cfg.command;
  j["z"] = cfg.z;
  j["c"] = cfg.c;
  j["k"] = cfg.k;
  j["n"] = cfg.n;
  j["z1"] = cfg.z1 ? nlohmann::json(*cfg.z1) : nlohmann::json(nullptr);
  j["z2"] = cfg.z2 ? nlohmann::json(*cfg.z2) : nlohmann::json(nullptr);
  j["z3"] = cfg.z3 ? nlohmann::json(*cfg.z3) : nlohmann::json(nullptr);
  j["c1"] = cfg.c1;
  j["c2"] = cfg.c2;
  j["c3"] = cfg.c3;
  j["t3"] = cfg.t3;
  j["x_range"] = format_range(cfg.x_range);
  j["y_range"] = format_range(cfg.y_range);
  j["field"] = cfg.field;
  j["out"] = cfg.out;
  j["outdir"] = cfg.outdir;
  j["suites"] = cfg.suites;
  j["convention"] = cfg.convention;
  return j;
}

void merge_json(const nlohmann::json& j, RunConfig& cfg) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  static const std::vector<std::string> known{"command", "z",  "c",  "k",  "n",       "z1",      "z2",
                                              "z3",      "c1", "c2", "c3", "t3",      "x_range", "y_range",
                                              "field",   "out", "outdir", "suites", "convention"};
  for (const auto& [key, v] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("unknown config key '" + key + "'");
  try {
    auto opt = [&](const char* key, std::optional<double>& dst) {
      if (j.contains(key)) dst = j[key].is_null() ? std::nullopt : std::optional<double>(j[key].get<double>());
    };
    if (j.contains("command")) cfg.command = j["command"].get<std::string>();
    if (j.contains("z")) cfg.z = j["z"].get<double>();
    if (j.contains("c")) cfg.c = j["c"].get<double>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    opt("z1", cfg.z1);
    opt("z2", cfg.z2);
    opt("z3", cfg.z3);
    if (j.contains("c1")) cfg.c1 = j["c1"].get<double>();
    if (j.contains("c2")) cfg.c2 = j["c2"].get<double>();
    if (j.contains("c3")) cfg.c3 = j["c3"].get<double>();
    if (j.contains("t3")) cfg.t3 = j["t3"].get<double>();
    if (j.contains("x_range")) cfg.x_range = parse_range(j["x_range"].get<std::string>());
    if (j.contains("y_range")) cfg.y_range = parse_range(j["y_range"].get<std::string>());
    if (j.contains("field")) cfg.field = j["field"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("outdir")) cfg.outdir = j["outdir"].get<std::string>();
    if (j.contains("suites")) cfg.suites = j["suites"].get<std::vector<std::string>>();
    if (j.contains("convention")) cfg.convention = j["convention"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

nlohmann::json report_to_json(const ConformanceReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"convention", c.convention.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.convention)},
                      {"grid", c.grid},
                      {"max_residual", c.max_residual},
                      {"status", status_name(c.status)},
                      {"notes", c.notes}});
  }
  nlohmann::json j;
  j["checks"] = checks;
  j["al_convention"] = rep.al_convention.empty() ? nlohmann::json(nullptr) : nlohmann::json(rep.al_convention);
  return j;
}

int write_field_csv(std::ostream& os, const std::string& field, const SolitonParams& p, int n, const Grid& grid,
                    std::ostream& log) {
  RationalFn f;
  if (field == "tau") {
    f = RationalFn(tau_cdkp(p));
  } else if (field == "q1") {
    f = q1_closed(p);
  } else if (field == "r1") {
    f = r1_closed(p);
  } else if (field == "u1" || field == "du1") {
    f = u1_closed(p);
  } else {
    throw UsageError("unknown field '" + field + "' (expected tau, q1, r1, u1 or du1)");
  }
  int poles = 0;
  os << "x,y,value\n";
  for (double y : grid.ys) {
    for (double x : grid.xs) {
      const Times t = make_times(x, y, grid.t3);
      std::string value;
      try {
        value = format_double(field == "du1" ? delta_u1(f, n, t) : f(n, t));
      } catch (const PoleError& e) {
        value = "nan";
        ++poles;
        log << "pole: " << field << " n=" << n << " x=" << x << " y=" << y << ": " << e.what() << "\n";
      }
      os << format_double(x) << ',' << format_double(y) << ',' << value << '\n';
    }
  }
  return poles;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string surface_script(const std::string& base, const std::string& title) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set terminal pngcairo size 900,700\n"
    << "set output '" << base << "_surface.png'\n"
    << "set title '" << title << "'\n"
    << "set xlabel 'x'\nset ylabel 'y'\nset zlabel 'value'\n"
    << "set ticslevel 0\nset palette rgbformulae 33,13,10\nunset key\n"
    << "splot '" << base << ".csv' every ::1 using 1:2:3 with points pointtype 7 pointsize 0.3 palette\n";
  return s.str();
}

std::string density_script(const std::string& base, const std::string& title) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set terminal pngcairo size 800,700\n"
    << "set output '" << base << "_density.png'\n"
    << "set title '" << title << " (density)'\n"
    << "set xlabel 'x'\nset ylabel 'y'\nset size ratio -1\n"
    << "set palette rgbformulae 33,13,10\nunset key\n"
    << "plot '" << base << ".csv' every ::1 using 1:2:3 with image\n";
  return s.str();
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SolitonParams p = cfg.params();
  const Grid g = cfg.grid({cfg.n});
  std::ostringstream csv;
  const int poles = write_field_csv(csv, cfg.field, p, cfg.n, g, err);
  if (cfg.out.empty()) {
    out << csv.str();
  } else {
    write_file(cfg.out, csv.str());
    err << "wrote " << cfg.out << " (" << g.xs.size() * g.ys.size() << " points, " << poles << " poles)\n";
  }
  return kExitOk;
}

int cmd_figures(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.outdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  struct Job {
    std::string field;
    int k;
    int n;
  };
  std::vector<Job> jobs;
  for (const char* f : {"q1", "r1"})
    for (int n = 0; n <= 2; ++n) jobs.push_back({f, 1, n});
  for (int k = 1; k <= 2; ++k)
    for (int n = 0; n <= 2; ++n) jobs.push_back({"u1", k, n});
  for (int n = 1; n <= 3; ++n) jobs.push_back({"du1", 1, n});

  for (const auto& job : jobs) {
    RunConfig c = cfg;
    c.k = job.k;
    const SolitonParams p = c.params();
    const std::string base = job.field + "_k" + std::to_string(job.k) + "_n" + std::to_string(job.n);
    std::ostringstream csv;
    const int poles = write_field_csv(csv, job.field, p, job.n, c.grid({job.n}), err);
    write_file(dir / (base + ".csv"), csv.str());
    const std::string title = job.field + " k=" + std::to_string(job.k) + " n=" + std::to_string(job.n);
    write_file(dir / (base + "_surface.gp"), surface_script(base, title));
    write_file(dir / (base + "_density.gp"), density_script(base, title));
    err << "wrote " << (dir / (base + ".csv")).string() << (poles ? " with poles" : "") << "\n";
  }
  out << jobs.size() << " figure data sets in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  VerifyOptions opt;
  for (const auto& s : cfg.suites) {
    for (const auto& part : split(s, ',')) {
      const auto& names = suite_names();
      if (part != "extra" && std::find(names.begin(), names.end(), part) == names.end())
        throw UsageError("unknown suite '" + part + "'");
      opt.suites.insert(part);
    }
  }
  if (!cfg.convention.empty()) {
    opt.convention = parse_convention(cfg.convention);
    if (!opt.convention) throw UsageError("unknown convention '" + cfg.convention + "'");
  }
  const ConformanceReport rep = run_all(opt);
  const std::string json = report_to_json(rep).dump(2) + "\n";
  if (cfg.out.empty())
    out << json;
  else
    write_file(cfg.out, json);
  for (const auto& c : rep.checks)
    if (c.is_criterion()) err << std::left << std::setw(34) << c.name << ' ' << status_name(c.status) << "\n";
  return rep.exit_code() == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const SolitonParams p = cfg.params();
  const int k = p.k();
  out << std::setprecision(12);
  out << "seeds z1=" << p.z1() << " z2=" << p.z2() << " z3=" << p.z3() << " k=" << k << "\n\n";

  out << "W4(f1, f2, D^k f1, D^k f2) against (z^k - z1^k)(z2^k - z3^k) V(z1,z2,z3,z) F at n=1, x=0.5, y=-0.25\n";
  const Times t = make_times(0.5, -0.25, cfg.t3);
  for (double zg : {0.25, -0.35, 0.8}) {
    if (zg == p.z1() || zg == p.z2() || zg == p.z3()) continue;
    SeedParams s{p.z1(), p.z2(), p.z3(), zg, p.c1(), p.c2(), p.c3(), 0.1};
    const ExpSum f1 = seed_f1(s), f2 = seed_f2(s);
    const ExpSum w4 = wronskian_fn(WronskianSpec{{f1, f2, delta_pow(f1, k), delta_pow(f2, k)}});
    out << "  z=" << std::setw(6) << zg << "  determinant " << std::setw(20) << w4(1, t) << "  factorized "
        << std::setw(20) << w4_factorized(s, k, 1, t) << "\n";
  }

  const SeedParams red = p.seeds();
  const double crit = criterion_flat({seed_f1(red), seed_f2(red)}, k, 1);
  out << "\nz = z2, d = c2: max scale-relative |W4| on the criterion grid = " << crit
      << (crit <= kWronskianZero ? "  (vanishes)" : "  (does not vanish)") << "\n";

  const ExpSum tau = tau_cdkp(p);
  const ExpSum w2 = wronskian_fn(WronskianSpec{{seed_f1(red), seed_f2(red)}});
  out << "tau_cdKP = (z2-z1) e1 e2 + (z3-z1) e1 e3 + (z3-z2) e2 e3: " << tau.size() << " atoms, prefactors "
      << p.z2() - p.z1() << ", " << p.z3() - p.z1() << ", " << p.z3() - p.z2() << "; equals W2(f1, f2): "
      << (nearly_same(tau, w2, 1e-12) ? "yes" : "no") << "\n";

  const SolutionSet s = build_via_pipeline(p);
  const Grid g = acceptance_grid(p.t3());
  out << "\npipeline vs closed forms (max relative error on " << g.describe() << ")\n"
      << "  q1 " << max_relative_error(g, s.q1, q1_closed(p)) << "\n"
      << "  r1 " << max_relative_error(g, s.r1, r1_closed(p)) << "\n"
      << "  u1 " << max_relative_error(g, s.u1, u1_closed(p)) << "\n";

  for (Choice ch : {Choice::ZEqZ1, Choice::ZEqZ3}) {
    const auto pc = SolitonParams::general(p.z1(), p.z2(), p.z3(), p.c1(), p.c2(), p.c3(), k, ch);
    const SolutionSet sc = build_via_pipeline(pc);
    out << "\nchoice " << choice_name(ch) << ": ";
    if (sc.surviving_channel != 0) {
      out << "T2(D^k f" << (3 - sc.surviving_channel) << ") vanishes; u1 = q1 Lambda^{-1} r1 is a one-soliton from channel "
          << sc.surviving_channel << "; single ridge at n=0: "
          << (single_ridge(sc.u1, 0, figure_grid({0})) ? "yes" : "no") << "\n";
    } else {
      out << "both transformed eigenfunctions survive and are proportional; a relabeled three-exponential reduction\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cdkp: constrained discrete KP solutions, figures and conformance checks", "cdkp"};
  app.require_subcommand(0, 1);
  app.set_help_all_flag("--help-all");

  double z = 0, c = 0, z1 = 0, z2 = 0, z3 = 0, c1 = 0, c2 = 0, c3 = 0, t3 = 0;
  int k = 0, n = 0;
  std::string xr, yr, field, outp, outdir, convention, config;
  std::vector<std::string> suites;
  bool dump = false;

  std::vector<CLI::App*> subs;
  for (const char* name : {"eval", "figures", "verify", "reduce"}) subs.push_back(app.add_subcommand(name));
  subs[0]->description("write one field on a grid as CSV");
  subs[1]->description("write the figure data sets and gnuplot scripts");
  subs[2]->description("run the conformance suites and write the JSON report");
  subs[3]->description("print the reduction of the two-channel tau function");

  std::vector<CLI::Option*> opts;
  auto add = [&](const std::string& flag, auto& var, const std::string& help) {
    opts.push_back(app.add_option(flag, var, help));
  };
  app.fallthrough();
  for (auto* s : subs) s->fallthrough();
  add("--z", z, "z of the specialized family (0 < |z| < 1)");
  add("--c", c, "phase constant c of the specialized family");
  add("--k", k, "constraint order k >= 1");
  add("--n", n, "lattice site n");
  add("--z1", z1, "z1 of the general family");
  add("--z2", z2, "z2 of the general family");
  add("--z3", z3, "z3 of the general family");
  add("--c1", c1, "c1 of the general family");
  add("--c2", c2, "c2 of the general family");
  add("--c3", c3, "c3 of the general family");
  add("--t3", t3, "time t3");
  add("--x-range", xr, "lo:hi:step");
  add("--y-range", yr, "lo:hi:step");
  add("--field", field, "tau, q1, r1, u1 or du1");
  add("--out", outp, "output file");
  add("--outdir", outdir, "output directory for figures");
  add("--suite", suites, "verification suites (repeatable or comma separated)");
  add("--convention", convention, "pin the lattice check to AS_PRINTED, FORMAL_ADJOINT or SHIFTED_VARIANT");
  add("--config", config, "JSON config file; flags override it");
  app.add_flag("--dump-config", dump, "print the effective config as JSON and exit");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cdkp: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config.empty()) {
      std::ifstream f(config);
      if (!f) throw UsageError("cannot read config file " + config);
      nlohmann::json j;
      try {
        f >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config " + config + " is not valid JSON: " + e.what());
      }
      merge_json(j, cfg);
    }
    for (auto* s : subs)
      if (s->parsed()) cfg.command = s->get_name();
    auto given = [&](const char* flag) { return app.count(flag) > 0; };
    if (given("--z")) cfg.z = z;
    if (given("--c")) cfg.c = c;
    if (given("--k")) cfg.k = k;
    if (given("--n")) cfg.n = n;
    if (given("--z1")) cfg.z1 = z1;
    if (given("--z2")) cfg.z2 = z2;
    if (given("--z3")) cfg.z3 = z3;
    if (given("--c1")) cfg.c1 = c1;
    if (given("--c2")) cfg.c2 = c2;
    if (given("--c3")) cfg.c3 = c3;
    if (given("--t3")) cfg.t3 = t3;
    if (given("--x-range")) cfg.x_range = parse_range(xr);
    if (given("--y-range")) cfg.y_range = parse_range(yr);
    if (given("--field")) cfg.field = field;
    if (given("--out")) cfg.out = outp;
    if (given("--outdir")) cfg.outdir = outdir;
    if (given("--suite")) cfg.suites = suites;
    if (given("--convention")) cfg.convention = convention;

    if (dump) {
      out << to_json(cfg).dump(2) << "\n";
      return kExitOk;
    }
    if (cfg.command.empty()) {
      err << app.help();
      return kExitUsage;
    }
    if (cfg.command == "eval") return cmd_eval(cfg, out, err);
    if (cfg.command == "figures") return cmd_figures(cfg, out, err);
    if (cfg.command == "verify") return cmd_verify(cfg, out, err);
    if (cfg.command == "reduce") return cmd_reduce(cfg, out, err);
    throw UsageError("unknown command '" + cfg.command + "'");
  } catch (const UsageError& e) {
    err << "cdkp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "cdkp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "cdkp: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace cdkp::cli
