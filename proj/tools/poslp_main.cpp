// poslp: (1+eps)-approximation solvers for positive linear programs.
//
// Subcommands:
//   solve-mpc | solve-cover | solve-fl   solve an instance file
//   gen                                  write a generated instance
//   bench                                scaling sweep with a CSV report
//
// Exit codes: 0 solved, 2 infeasible (certificate attached), 3 iteration cap
// exceeded, 1 --check failure, 64 usage error, 65 malformed input.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poslp/check.hpp"
#include "poslp/covering.hpp"
#include "poslp/facility_location.hpp"
#include "poslp/generators.hpp"
#include "poslp/io.hpp"
#include "poslp/mpc_parallel.hpp"
#include "poslp/mpc_reference.hpp"
#include "poslp/mpc_sequential.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitUsage = 64;
constexpr int kExitBadInput = 65;

struct SolveArgs {
  std::string input;
  std::string algo = "sequential";
  double eps = 0.1;
  int threads = 1;
  std::string out;
  std::string report;
  bool check = false;
};

int status_to_exit(poslp::SolveStatus status) {
  switch (status) {
    case poslp::SolveStatus::Solved: return kExitSolved;
    case poslp::SolveStatus::Infeasible: return kExitInfeasible;
    case poslp::SolveStatus::IterationCapExceeded: return kExitCapExceeded;
  }
  return kExitUsage;
}

double wall_ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_summary_json(const poslp::SolveReport& rep, double wall_ms) {
  std::ostringstream os;
  os.precision(12);
  os << "{\"status\":\"" << poslp::to_string(rep.status) << "\"";
  if (std::isfinite(rep.cost)) os << ",\"cost\":" << rep.cost;
  if (std::isfinite(rep.lower_bound)) os << ",\"lower_bound\":" << rep.lower_bound;
  os << ",\"increments\":" << rep.counters.increments
     << ",\"scalings\":" << rep.counters.scalings
     << ",\"work\":" << rep.counters.work_units
     << ",\"estimate_updates\":" << rep.counters.estimate_updates
     << ",\"u\":" << rep.diagnostics.u
     << ",\"wall_ms\":" << wall_ms << "}";
  return os.str();
}

void write_outputs(const SolveArgs& args, const poslp::SolveReport& rep,
                   const poslp::FacilityInstance* fl, double wall_ms) {
  if (!args.out.empty()) {
    poslp::write_text_file(args.out, poslp::solution_to_json(rep, fl));
  }
  const std::string summary = run_summary_json(rep, wall_ms);
  if (!args.report.empty()) {
    poslp::write_text_file(args.report, summary);
  } else {
    std::cout << summary << "\n";
  }
}

int solve_mpc_cmd(const SolveArgs& args) {
  auto any = poslp::read_instance_file(args.input);
  auto* inst = std::get_if<poslp::MixedInstance>(&any);
  if (inst == nullptr) {
    std::cerr << "poslp: input is not an mpc instance\n";
    return kExitUsage;
  }
  poslp::normalize(*inst);
  if (auto v = poslp::validate(*inst); !v.ok) {
    if (v.infeasible) {
      std::cerr << "poslp: infeasible at validation: " << v.message << "\n";
      return kExitInfeasible;
    }
    std::cerr << "poslp: invalid instance: " << v.message << "\n";
    return kExitBadInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  poslp::SolveReport rep;
  if (args.algo == "reference") {
    poslp::MpcOptions opt;
    opt.epsilon = args.eps;
    rep = poslp::solve_reference(*inst, opt);
  } else if (args.algo == "sequential") {
    poslp::MpcOptionsSequential opt;
    opt.epsilon = args.eps;
    rep = poslp::solve_sequential(*inst, opt);
  } else if (args.algo == "parallel") {
    poslp::MpcOptionsParallel opt;
    opt.epsilon = args.eps;
    opt.threads = args.threads;
    rep = poslp::solve_parallel(*inst, opt);
  } else {
    std::cerr << "poslp: unknown --algo '" << args.algo << "' for solve-mpc\n";
    return kExitUsage;
  }
  write_outputs(args, rep, nullptr, wall_ms_since(t0));

  if (args.check) {
    if (rep.status == poslp::SolveStatus::Solved) {
      const auto fr = poslp::check_solution(*inst, rep.x, 1e-9, 5.0 * args.eps);
      if (!fr.pass) {
        std::cerr << "poslp: solution check failed: " << fr.message << "\n";
        return kExitCheckFailed;
      }
    } else if (rep.status == poslp::SolveStatus::Infeasible) {
      std::string why;
      if (!rep.infeasibility ||
          !poslp::verify_infeasibility_certificate(*inst, *rep.infeasibility, &why)) {
        std::cerr << "poslp: infeasibility certificate rejected: " << why << "\n";
        return kExitCheckFailed;
      }
    }
  }
  return status_to_exit(rep.status);
}

int solve_cover_cmd(const SolveArgs& args) {
  auto any = poslp::read_instance_file(args.input);
  auto* inst = std::get_if<poslp::CoveringInstance>(&any);
  if (inst == nullptr) {
    std::cerr << "poslp: input is not a covering instance\n";
    return kExitUsage;
  }
  poslp::normalize(*inst);
  if (auto v = poslp::validate(*inst); !v.ok) {
    if (v.infeasible) {
      std::cerr << "poslp: infeasible at validation: " << v.message << "\n";
      return kExitInfeasible;
    }
    std::cerr << "poslp: invalid instance: " << v.message << "\n";
    return kExitBadInput;
  }
  if (args.algo != "sequential") {
    std::cerr << "poslp: solve-cover supports --algo sequential only\n";
    return kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  poslp::CoveringOptions opt;
  opt.epsilon = args.eps;
  poslp::SolveReport rep = poslp::solve_covering(*inst, opt);
  write_outputs(args, rep, nullptr, wall_ms_since(t0));

  if (args.check && rep.status == poslp::SolveStatus::Solved) {
    const auto fr = poslp::check_solution(*inst, rep.x, 1e-9);
    std::string why;
    const bool bound_ok = !rep.bound || poslp::verify_cover_bound(*inst, *rep.bound, &why);
    if (!fr.pass || !bound_ok) {
      std::cerr << "poslp: solution check failed: " << (fr.pass ? why : fr.message) << "\n";
      return kExitCheckFailed;
    }
  }
  return status_to_exit(rep.status);
}

int solve_fl_cmd(const SolveArgs& args) {
  auto any = poslp::read_instance_file(args.input);
  auto* inst = std::get_if<poslp::FacilityInstance>(&any);
  if (inst == nullptr) {
    std::cerr << "poslp: input is not a facility location instance\n";
    return kExitUsage;
  }
  if (auto v = poslp::validate(*inst); !v.ok) {
    std::cerr << "poslp: invalid instance: " << v.message << "\n";
    return kExitBadInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  poslp::FlOptions opt;
  opt.epsilon = args.eps;
  opt.threads = args.threads;
  poslp::SolveReport rep;
  if (args.algo == "sequential") {
    rep = poslp::solve_fl_sequential(*inst, opt);
  } else if (args.algo == "parallel") {
    rep = poslp::solve_fl_parallel(*inst, opt);
  } else {
    std::cerr << "poslp: unknown --algo '" << args.algo << "' for solve-fl\n";
    return kExitUsage;
  }
  write_outputs(args, rep, inst, wall_ms_since(t0));

  if (args.check && rep.status == poslp::SolveStatus::Solved) {
    const auto fr = poslp::check_solution(*inst, rep.x, rep.y, 1e-9);
    std::string why;
    const bool bound_ok = !rep.bound || poslp::verify_fl_bound(*inst, *rep.bound, &why);
    if (!fr.pass || !bound_ok) {
      std::cerr << "poslp: solution check failed: " << (fr.pass ? why : fr.message) << "\n";
      return kExitCheckFailed;
    }
    if (std::isfinite(rep.cost) && rep.lower_bound > 0.0 &&
        rep.cost > (1.0 + 6.0 * args.eps) * rep.lower_bound) {
      std::cerr << "poslp: cost " << rep.cost << " exceeds (1+6eps) * lower bound "
                << rep.lower_bound << "\n";
      return kExitCheckFailed;
    }
  }
  return status_to_exit(rep.status);
}

struct GenArgs {
  std::string kind;
  std::int32_t n = 50, m = 50, row_nnz = 8;
  std::int32_t clients = 6, facilities = 4, pairs = 20;
  std::uint64_t seed = 1;
  double cost_lo = 0.5, cost_hi = 2.0;
  std::string out;
  std::string sidecar;
};

int gen_cmd(const GenArgs& args) {
  if (args.kind == "mpc-planted-feasible" || args.kind == "mpc-planted-infeasible") {
    poslp::MpcGenSpec spec;
    spec.n = args.n;
    spec.packing_rows = args.m;
    spec.covering_rows = args.m;
    spec.row_nnz = args.row_nnz;
    spec.seed = args.seed;
    spec.planted_infeasible = (args.kind == "mpc-planted-infeasible");
    auto result = poslp::generate_mpc(spec);
    poslp::write_text_file(args.out, poslp::instance_to_json(result.instance));
    if (!args.sidecar.empty() && !spec.planted_infeasible) {
      std::ostringstream os;
      os.precision(17);
      os << "{\"x_star\":[";
      for (std::size_t j = 0; j < result.x_star.size(); ++j) {
        os << (j ? "," : "") << result.x_star[j];
      }
      os << "]}";
      poslp::write_text_file(args.sidecar, os.str());
    }
    return 0;
  }
  if (args.kind == "cover-random") {
    poslp::CoverGenSpec spec;
    spec.elements = args.m;
    spec.sets = args.n;
    spec.row_nnz = args.row_nnz;
    spec.seed = args.seed;
    spec.cost_lo = args.cost_lo;
    spec.cost_hi = args.cost_hi;
    poslp::write_text_file(args.out, poslp::instance_to_json(poslp::generate_cover(spec)));
    return 0;
  }
  if (args.kind == "fl-random") {
    poslp::FlGenSpec spec;
    spec.clients = args.clients;
    spec.facilities = args.facilities;
    spec.pair_count = args.pairs;
    spec.seed = args.seed;
    poslp::write_text_file(args.out, poslp::instance_to_json(poslp::generate_fl(spec)));
    return 0;
  }
  std::cerr << "poslp: unknown generator kind '" << args.kind << "'\n";
  return kExitUsage;
}

struct BenchArgs {
  std::string problem = "mpc";
  std::vector<std::string> algos = {"sequential"};
  std::vector<std::int64_t> sizes;
  double eps = 0.1;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
};

struct BenchRow {
  std::int64_t nnz = 0;
  std::int32_t m = 0, n = 0;
  double eps = 0.0;
  std::string algo;
  poslp::SolveReport rep;
  double wall_ms = 0.0;
};

void append_csv_row(std::ostringstream& csv, const BenchRow& row) {
  const auto& rep = row.rep;
  char buf[512];
  const double ratio = (std::isfinite(rep.cost) && rep.lower_bound > 0.0)
                           ? rep.cost / rep.lower_bound
                           : std::numeric_limits<double>::quiet_NaN();
  std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%.9g,%s,%s,%.9g,%.9g,%.9g,%llu,%llu,%llu,%.3f\n",
                static_cast<long long>(row.nnz), row.m, row.n, row.eps, row.algo.c_str(),
                poslp::to_string(rep.status), rep.cost, rep.lower_bound, ratio,
                static_cast<unsigned long long>(rep.counters.scalings),
                static_cast<unsigned long long>(rep.counters.increments),
                static_cast<unsigned long long>(rep.counters.work_units), row.wall_ms);
  csv << buf;
}

double fitted_slope(const std::vector<double>& log_n, const std::vector<double>& log_w) {
  const std::size_t k = log_n.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += log_n[i];
    sy += log_w[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_w[i];
  }
  const double denom = k * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (k * sxy - sx * sy) / denom;
}

int bench_cmd(const BenchArgs& args) {
  if (args.sizes.empty()) {
    std::cerr << "poslp: bench needs --sizes\n";
    return kExitUsage;
  }
  std::ostringstream csv;
  csv << "N,m,n,eps,algo,status,cost,lower_bound,ratio,phases,increments,work,wall_ms\n";
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;

  for (const std::string& algo : args.algos) {
    for (std::int64_t target : args.sizes) {
      BenchRow row;
      row.eps = args.eps;
      row.algo = algo;
      const auto t0 = std::chrono::steady_clock::now();

      if (args.problem == "mpc") {
        auto gen = poslp::generate_mpc(poslp::mpc_spec_for_nnz(target, args.seed + target));
        poslp::normalize(gen.instance);
        row.nnz = static_cast<std::int64_t>(gen.instance.nonzero_count());
        row.m = gen.instance.packing_rows() + gen.instance.covering_rows();
        row.n = gen.instance.n;
        if (algo == "reference") {
          poslp::MpcOptions opt;
          opt.epsilon = args.eps;
          row.rep = poslp::solve_reference(gen.instance, opt);
        } else if (algo == "sequential") {
          poslp::MpcOptionsSequential opt;
          opt.epsilon = args.eps;
          row.rep = poslp::solve_sequential(gen.instance, opt);
        } else if (algo == "parallel") {
          poslp::MpcOptionsParallel opt;
          opt.epsilon = args.eps;
          opt.threads = args.threads;
          row.rep = poslp::solve_parallel(gen.instance, opt);
        } else {
          std::cerr << "poslp: unknown algo '" << algo << "'\n";
          return kExitUsage;
        }
        if (row.rep.status != poslp::SolveStatus::Solved ||
            !poslp::check_solution(gen.instance, row.rep.x, 1e-9, 5.0 * args.eps).pass) {
          std::cerr << "poslp: bench run failed its check (N=" << target << ", algo=" << algo
                    << ", status=" << poslp::to_string(row.rep.status) << ")\n";
          return kExitCheckFailed;
        }
        row.rep.cost = 0.0;
        row.rep.lower_bound = 0.0;
        for (const auto& r : gen.instance.packing.rows) {
          double v = 0.0;
          for (const auto& e : r.entries) v += e.coef * row.rep.x[e.column];
          row.rep.cost = std::max(row.rep.cost, v);
        }
        row.rep.lower_bound = std::numeric_limits<double>::infinity();
        for (const auto& r : gen.instance.covering.rows) {
          double v = 0.0;
          for (const auto& e : r.entries) v += e.coef * row.rep.x[e.column];
          row.rep.lower_bound = std::min(row.rep.lower_bound, v);
        }
      } else if (args.problem == "cover") {
        poslp::CoverGenSpec spec;
        spec.elements = static_cast<std::int32_t>(std::max<std::int64_t>(4, target / 8));
        spec.sets = spec.elements * 2;
        spec.row_nnz = 4;
        spec.seed = args.seed + static_cast<std::uint64_t>(target);
        auto inst = poslp::generate_cover(spec);
        poslp::normalize(inst);
        row.nnz = static_cast<std::int64_t>(inst.system.nonzero_count());
        row.m = inst.rows();
        row.n = inst.n();
        poslp::CoveringOptions opt;
        opt.epsilon = args.eps;
        row.rep = poslp::solve_covering(inst, opt);
        if (row.rep.status != poslp::SolveStatus::Solved ||
            !poslp::check_solution(inst, row.rep.x, 1e-9).pass) {
          std::cerr << "poslp: bench run failed its check (N=" << target << ")\n";
          return kExitCheckFailed;
        }
      } else if (args.problem == "fl") {
        poslp::FlGenSpec spec;
        spec.clients = static_cast<std::int32_t>(std::max<std::int64_t>(4, target / 12));
        spec.facilities = std::max(2, spec.clients / 3);
        spec.pair_count = static_cast<std::int32_t>(
            std::min<std::int64_t>(target, static_cast<std::int64_t>(spec.clients) * spec.facilities));
        spec.seed = args.seed + static_cast<std::uint64_t>(target);
        auto inst = poslp::generate_fl(spec);
        row.nnz = static_cast<std::int64_t>(inst.pair_count());
        row.m = inst.m_clients;
        row.n = inst.n_facilities;
        poslp::FlOptions opt;
        opt.epsilon = args.eps;
        opt.threads = args.threads;
        row.rep = (algo == "parallel") ? poslp::solve_fl_parallel(inst, opt)
                                       : poslp::solve_fl_sequential(inst, opt);
        if (row.rep.status != poslp::SolveStatus::Solved ||
            !poslp::check_solution(inst, row.rep.x, row.rep.y, 1e-9).pass) {
          std::cerr << "poslp: bench run failed its check (N=" << target << ")\n";
          return kExitCheckFailed;
        }
      } else {
        std::cerr << "poslp: unknown problem '" << args.problem << "'\n";
        return kExitUsage;
      }

      row.wall_ms = wall_ms_since(t0);
      append_csv_row(csv, row);
      auto& [ln, lw] = series[row.algo];
      ln.push_back(std::log(static_cast<double>(row.nnz)));
      lw.push_back(std::log(static_cast<double>(row.rep.counters.work_units)));
    }
  }

  if (!args.out.empty()) {
    poslp::write_text_file(args.out, csv.str());
  } else {
    std::cout << csv.str();
  }
  for (const auto& [algo, xy] : series) {
    if (xy.first.size() >= 3) {
      std::fprintf(stderr, "slope(%s) = %.4f\n", algo.c_str(), fitted_slope(xy.first, xy.second));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(1+eps)-approximation solvers for mixed packing/covering, pure covering, "
               "and fractional facility location"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  GenArgs gen_args;
  BenchArgs bench_args;

  auto add_solve_flags = [&](CLI::App* cmd) {
    cmd->add_option("--input", solve_args.input, "instance JSON file")->required();
    cmd->add_option("--eps", solve_args.eps, "epsilon in (0, 1/10]")->required();
    cmd->add_option("--algo", solve_args.algo, "reference|sequential|parallel");
    cmd->add_option("--threads", solve_args.threads, "thread count for parallel algorithms");
    cmd->add_option("--out", solve_args.out, "solution JSON path");
    cmd->add_option("--report", solve_args.report, "run summary JSON path");
    cmd->add_flag("--check", solve_args.check, "re-verify the solution and certificates");
  };
  auto* solve_mpc = app.add_subcommand("solve-mpc", "solve a mixed packing/covering instance");
  add_solve_flags(solve_mpc);
  auto* solve_cover = app.add_subcommand("solve-cover", "solve a pure covering instance");
  add_solve_flags(solve_cover);
  auto* solve_fl = app.add_subcommand("solve-fl", "solve a facility location instance");
  add_solve_flags(solve_fl);

  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("--kind", gen_args.kind,
                  "mpc-planted-feasible|mpc-planted-infeasible|cover-random|fl-random")
      ->required();
  gen->add_option("--n", gen_args.n, "columns (mpc: variables; cover: sets)");
  gen->add_option("--m", gen_args.m, "rows per side (mpc) or elements (cover)");
  gen->add_option("--row-nnz", gen_args.row_nnz, "nonzeros per row");
  gen->add_option("--clients", gen_args.clients, "fl: clients");
  gen->add_option("--facilities", gen_args.facilities, "fl: facilities");
  gen->add_option("--pairs", gen_args.pairs, "fl: finite pairs");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--cost-lo", gen_args.cost_lo, "cover: cost range low");
  gen->add_option("--cost-hi", gen_args.cost_hi, "cover: cost range high");
  gen->add_option("--out", gen_args.out, "instance file path")->required();
  gen->add_option("--sidecar", gen_args.sidecar, "planted witness path (feasible kinds)");

  auto* bench = app.add_subcommand("bench", "scaling sweep; prints the fitted log-log slope");
  bench->add_option("--problem", bench_args.problem, "mpc|cover|fl");
  bench->add_option("--algos", bench_args.algos, "algorithms to sweep")->delimiter(',');
  bench->add_option("--sizes", bench_args.sizes, "target nonzero counts")->delimiter(',')->required();
  bench->add_option("--eps", bench_args.eps, "epsilon");
  bench->add_option("--seed", bench_args.seed, "base seed");
  bench->add_option("--threads", bench_args.threads, "threads for parallel algos");
  bench->add_option("--out", bench_args.out, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (solve_mpc->parsed()) return solve_mpc_cmd(solve_args);
    if (solve_cover->parsed()) return solve_cover_cmd(solve_args);
    if (solve_fl->parsed()) return solve_fl_cmd(solve_args);
    if (gen->parsed()) return gen_cmd(gen_args);
    if (bench->parsed()) return bench_cmd(bench_args);
  } catch (const poslp::ParseError& e) {
    std::cerr << "poslp: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "poslp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "poslp: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitUsage;
}
