#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcf/bipartite.hpp"
#include "dcf/cyclable.hpp"
#include "dcf/errors.hpp"
#include "dcf/factor_solver.hpp"
#include "dcf/generators.hpp"
#include "dcf/io.hpp"
#include "dcf/oracle.hpp"

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

#ifndef DCF_BUILD_ID
#define DCF_BUILD_ID "unknown"
#endif

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

dcf::EmitFormat parse_format(const std::string& f) {
  if (f == "json") return dcf::EmitFormat::json;
  if (f == "dot") return dcf::EmitFormat::dot;
  throw dcf::ParseError("unknown format '" + f + "'", 1, 1);
}

int worker_count() {
  if (const char* env = std::getenv("DCF_WORKERS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Partition shapes of m for a sweep policy. "all" enumerates every shape
// with parts >= min_part (capped at m <= 8, falling back to balanced);
// "balanced" the evenest shape for each feasible count; "pairs" the
// smallest-part shape.
std::vector<std::vector<int>> partition_shapes(int m, const std::string& policy,
                                               int min_part) {
  std::vector<std::vector<int>> out;
  if (m < min_part) return out;
  if (policy == "all" && m <= 8) {
    std::vector<int> cur;
    auto rec = [&](auto&& self, int left, int max_part) -> void {
      if (left == 0) {
        out.push_back(cur);
        return;
      }
      for (int p = std::min(left, max_part); p >= min_part; --p) {
        if (left - p != 0 && left - p < min_part) continue;
        cur.push_back(p);
        self(self, left - p, p);
        cur.pop_back();
      }
    };
    rec(rec, m, m);
    return out;
  }
  if (policy == "pairs") {
    int k = m / min_part;
    if (k >= 1) {
      std::vector<int> shape(k, min_part);
      shape[0] += m - k * min_part;
      out.push_back(std::move(shape));
    }
    return out;
  }
  // balanced (and the fallback for "all" beyond the cap)
  for (int k = 1; k * min_part <= m; ++k) {
    std::vector<int> shape(k, m / k);
    for (int i = 0; i < m % k; ++i) ++shape[i];
    out.push_back(std::move(shape));
  }
  return out;
}

struct SweepConfig {
  std::string theorem = "1";
  int n_min = 4;
  int n_max = 4;
  bool exhaustive = false;
  long long random_count = 0;
  uint64_t seed = 1;
  std::string partitions = "all";
  bool huge = false;
  long long budget = 200'000'000;
  std::string emit_dir;
  bool trace = false;
};

struct SweepTally {
  std::atomic<long long> instances{0};
  std::atomic<long long> gate_passed{0};
  std::atomic<long long> solved{0};
  std::atomic<long long> failures{0};
  std::atomic<long long> backtracking{0};
  std::atomic<long long> fallbacks{0};
  std::atomic<long long> oracle_runs{0};
  std::atomic<long long> oracle_disagreements{0};
  std::atomic<long long> counterexamples{0};
};

void sweep_one(const SweepConfig& cfg, const dcf::Digraph& d,
               const dcf::VertexSet& w, SweepTally& tally, std::mutex& emit_mu,
               long long instance_id) {
  int n = d.order();
  int min_part = cfg.theorem == "c8" ? 3 : 2;
  auto shapes = partition_shapes(w.size(), cfg.partitions, min_part);
  int delta = dcf::min_semi_degree(d, w);

  if (cfg.theorem == "3") {
    ++tally.instances;
    if (2 * delta < n || w.size() < 2) return;
    ++tally.gate_passed;
    try {
      auto res = dcf::find_w_cycle(d, w);
      if (res.stats.used_backtracking) ++tally.backtracking;
      if (res.stats.used_fallback) ++tally.fallbacks;
      if (!res.cycle) {
        ++tally.failures;
        return;
      }
      ++tally.solved;
      if (n <= 8) {
        ++tally.oracle_runs;
        auto ver = dcf::oracle_cyclable(d, w, cfg.budget);
        if (ver.verdict != dcf::OracleVerdict::yes) ++tally.oracle_disagreements;
      }
    } catch (const dcf::GuaranteeViolation&) {
      ++tally.failures;
    }
    return;
  }

  for (const auto& shape : shapes) {
    ++tally.instances;
    dcf::Partition parts = dcf::Partition::of(shape);
    if (cfg.theorem == "1") {
      if (4 * delta < 3 * n - 3) continue;
      ++tally.gate_passed;
      try {
        auto res = dcf::solve_w_cycle_factor(d, w, parts);
        if (res.stats.used_backtracking) ++tally.backtracking;
        if (res.stats.used_fallback) ++tally.fallbacks;
        if (!res.certificate) {
          ++tally.failures;
          continue;
        }
        ++tally.solved;
        if (n <= 8) {
          ++tally.oracle_runs;
          auto ver = dcf::oracle_factor_exists(d, w, parts, cfg.budget);
          if (ver.verdict != dcf::OracleVerdict::yes)
            ++tally.oracle_disagreements;
        }
      } catch (const dcf::GuaranteeViolation&) {
        ++tally.failures;
      }
    } else if (cfg.theorem == "5") {
      if (n < 2 * w.size() || 2 * delta < n + 2 * w.size() - 2) continue;
      ++tally.gate_passed;
      try {
        dcf::theorem5_factor(d, w, parts);
        ++tally.solved;
      } catch (const dcf::GuaranteeViolation&) {
        ++tally.failures;
      }
    } else if (cfg.theorem == "c8") {
      if (3 * delta < 2 * n) continue;
      ++tally.gate_passed;
      dcf::SolveOptions opts;
      opts.mode = dcf::SolveMode::best_effort;
      auto res = dcf::solve_w_cycle_factor(d, w, parts, opts);
      if (res.stats.used_backtracking) ++tally.backtracking;
      if (res.stats.used_fallback) ++tally.fallbacks;
      if (res.certificate) {
        ++tally.solved;
        continue;
      }
      // A hypothesis-passing instance with no factor: report it verbatim.
      ++tally.counterexamples;
      std::lock_guard<std::mutex> lock(emit_mu);
      std::ostringstream name;
      name << "counterexample-" << instance_id << ".txt";
      std::string body = dcf::write_digraph_text(d) + "# W: " +
                         dcf::write_w_text(w);
      if (!cfg.emit_dir.empty())
        write_output(cfg.emit_dir + "/" + name.str(), body);
      else
        std::cerr << "counterexample:\n" << body;
    }
  }
}

int run_sweep(const SweepConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  SweepTally tally;
  std::mutex emit_mu;
  int workers = worker_count();

  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    if (cfg.exhaustive) {
      if (n > 5 || (n == 5 && !cfg.huge))
        throw dcf::PreconditionError(
            "exhaustive sweeps support n <= 4, or n = 5 with --huge");
      uint64_t total = dcf::labeled_digraph_count(n);
      std::atomic<uint64_t> next{0};
      auto worker = [&]() {
        while (true) {
          uint64_t mask = next.fetch_add(1);
          if (mask >= total) return;
          dcf::Digraph d = dcf::digraph_from_arc_mask(n, mask);
          for (uint64_t wbits = 0; wbits < (uint64_t{1} << n); ++wbits) {
            if (std::popcount(wbits) < 2) continue;
            std::vector<int> ids;
            for (int v = 0; v < n; ++v)
              if ((wbits >> v) & 1) ids.push_back(v);
            dcf::VertexSet w = dcf::VertexSet::of(n, std::move(ids));
            sweep_one(cfg, d, w, tally, emit_mu,
                      static_cast<long long>(mask * (uint64_t{1} << n) + wbits));
          }
        }
      };
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    } else {
      long long count = cfg.random_count;
      std::atomic<long long> next{0};
      auto worker = [&]() {
        while (true) {
          long long i = next.fetch_add(1);
          if (i >= count) return;
          std::mt19937_64 rng(cfg.seed + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull +
                              static_cast<uint64_t>(n) * 0x100000001b3ull);
          int wsize = 2 + static_cast<int>(rng() % std::max(1, n - 1));
          dcf::Digraph d = dcf::gen_random(n, 0.5 + 0.5 * ((rng() >> 11) * 0x1.0p-53), rng());
          std::vector<int> ids(n);
          for (int v = 0; v < n; ++v) ids[v] = v;
          for (int v = 0; v < wsize; ++v) {
            int j = v + static_cast<int>(rng() % (n - v));
            std::swap(ids[v], ids[j]);
          }
          std::vector<int> chosen(ids.begin(), ids.begin() + wsize);
          dcf::VertexSet w = dcf::VertexSet::of(n, std::move(chosen));
          sweep_one(cfg, d, w, tally, emit_mu, i);
        }
      };
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
  }

  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  std::cout << "sweep theorem=" << cfg.theorem << " n=" << cfg.n_min << ".."
            << cfg.n_max << (cfg.exhaustive ? " exhaustive" : " random")
            << " seed=" << cfg.seed << " build=" << DCF_BUILD_ID << "\n"
            << "instances " << tally.instances << "\n"
            << "gate-passed " << tally.gate_passed << "\n"
            << "solved " << tally.solved << "\n"
            << "failures " << tally.failures << "\n"
            << "backtracking-used " << tally.backtracking << "\n"
            << "fallback-used " << tally.fallbacks << "\n"
            << "oracle-runs " << tally.oracle_runs << "\n"
            << "oracle-disagreements " << tally.oracle_disagreements << "\n";
  if (cfg.theorem == "c8")
    std::cout << "counterexamples " << tally.counterexamples << "\n";
  std::cout << "wall-ms " << ms << "\n";
  if (tally.failures > 0 || tally.oracle_disagreements > 0) return kExitNo;
  return kExitYes;
}

dcf::CycleFactorCertificate parse_certificate_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open certificate: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  dcf::CycleFactorCertificate cert;
  for (const auto& c : j.at("cycles")) {
    cert.cycles.push_back(c.at("vertices").get<std::vector<int>>());
    cert.w_counts.push_back(c.at("w_count").get<int>());
  }
  return cert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"W-cycle-factor and cyclability toolkit"};
  app.require_subcommand(1);

  std::string digraph_path, w_path, parts_csv, cert_path, out_path;
  std::string mode = "guaranteed", format = "json", kind = "factor";
  bool trace_moves = false, dump_bip = false, use_oracle = false, huge = false;
  long long budget = 200'000'000;

  auto add_instance_opts = [&](CLI::App* cmd, bool with_parts) {
    cmd->add_option("--digraph", digraph_path, "edge-list file")->required();
    cmd->add_option("--w", w_path, "W vertex file")->required();
    if (with_parts)
      cmd->add_option("--parts", parts_csv, "comma-separated partition")
          ->required();
    cmd->add_option("--format", format, "json|dot");
    cmd->add_option("--out", out_path, "output file ('-' = stdout)");
    cmd->add_flag("--trace-moves", trace_moves, "stream applied moves");
    cmd->add_flag("--dump-bipartite", dump_bip, "print the marked bipartite form");
    cmd->add_option("--budget", budget, "search node budget");
  };

  CLI::App* solve = app.add_subcommand("solve", "find a W-cycle-factor");
  add_instance_opts(solve, true);
  solve->add_option("--mode", mode, "guaranteed|best-effort");

  CLI::App* cyclable = app.add_subcommand("cyclable", "find a cycle through W");
  add_instance_opts(cyclable, false);
  cyclable->add_option("--mode", mode, "guaranteed|best-effort");

  CLI::App* t5 = app.add_subcommand("t5-factor", "greedy chaining factor");
  add_instance_opts(t5, true);

  CLI::App* gen = app.add_subcommand("gen", "write generated instances");
  gen->require_subcommand(1);
  int gk = 1, ga = 2, gb = 3, gn = 10;
  double gp = 0.5;
  uint64_t gseed = 1;
  std::string table_path;
  CLI::App* gen_d1c = gen->add_subcommand("d1", "first extremal digraph");
  gen_d1c->add_option("--k", gk)->required();
  gen_d1c->add_option("--table", table_path, "orientation table override");
  gen_d1c->add_option("--out", out_path);
  CLI::App* gen_d2c = gen->add_subcommand("d2", "second extremal digraph");
  gen_d2c->add_option("--k", gk)->required();
  gen_d2c->add_option("--table", table_path, "orientation table override");
  gen_d2c->add_option("--out", out_path);
  CLI::App* gen_kb = gen->add_subcommand("kbipsym", "complete bipartite symmetric");
  gen_kb->add_option("--a", ga)->required();
  gen_kb->add_option("--b", gb)->required();
  gen_kb->add_option("--out", out_path);
  CLI::App* gen_rand = gen->add_subcommand("random", "random digraph");
  gen_rand->add_option("--n", gn)->required();
  gen_rand->add_option("--p", gp)->required();
  gen_rand->add_option("--seed", gseed)->required();
  gen_rand->add_option("--out", out_path);

  CLI::App* verify = app.add_subcommand("verify", "validate or decide instances");
  verify->add_option("--digraph", digraph_path)->required();
  verify->add_option("--w", w_path)->required();
  verify->add_option("--parts", parts_csv);
  verify->add_option("--certificate", cert_path, "certificate JSON to validate");
  verify->add_flag("--oracle", use_oracle, "decide by exhaustive search");
  verify->add_option("--kind", kind, "factor|cyclable|digons");
  verify->add_option("--budget", budget);

  SweepConfig sweep_cfg;
  CLI::App* sweep = app.add_subcommand("sweep", "hypothesis sweeps");
  sweep->add_option("--theorem", sweep_cfg.theorem, "1|3|5|c8")->required();
  sweep->add_option("--n-min", sweep_cfg.n_min)->required();
  sweep->add_option("--n-max", sweep_cfg.n_max)->required();
  bool exhaustive = false;
  sweep->add_flag("--exhaustive", exhaustive);
  sweep->add_option("--random", sweep_cfg.random_count, "random trial count");
  sweep->add_option("--seed", sweep_cfg.seed);
  sweep->add_option("--partitions", sweep_cfg.partitions, "all|balanced|pairs");
  sweep->add_flag("--huge", huge, "allow n = 5 exhaustive enumeration");
  sweep->add_option("--budget", sweep_cfg.budget);
  sweep->add_option("--emit-dir", sweep_cfg.emit_dir, "counterexample directory");

  try {
    app.parse(argc, argv);

    dcf::TraceFn tracer;
    if (trace_moves)
      tracer = [](const std::string& line) { std::cerr << line << "\n"; };

    if (solve->parsed()) {
      dcf::Digraph d = dcf::parse_digraph_file(digraph_path);
      dcf::VertexSet w = dcf::parse_w_file(w_path, d.order());
      dcf::Partition parts = dcf::parse_partition_text(parts_csv);
      if (dump_bip)
        std::cerr << dcf::dump_bipartite(
            dcf::mark_m0(dcf::build_bipartite_rep(d), w));
      dcf::SolveOptions opts;
      opts.mode = mode == "best-effort" ? dcf::SolveMode::best_effort
                                        : dcf::SolveMode::guaranteed;
      opts.fallback_budget = budget;
      opts.trace = tracer;
      auto res = dcf::solve_w_cycle_factor(d, w, parts, opts);
      if (res.certificate) {
        write_output(out_path, dcf::emit_certificate(d, w, *res.certificate,
                                                     parse_format(format)));
        return kExitYes;
      }
      std::cerr << "no factor: " << res.report->reason << "\n";
      if (res.report->oracle)
        std::cerr << "oracle verdict: "
                  << (*res.report->oracle == dcf::OracleVerdict::yes
                          ? "yes"
                          : *res.report->oracle == dcf::OracleVerdict::no
                                ? "no"
                                : "budget-exceeded")
                  << "\n";
      return kExitNo;
    }

    if (cyclable->parsed()) {
      dcf::Digraph d = dcf::parse_digraph_file(digraph_path);
      dcf::VertexSet w = dcf::parse_w_file(w_path, d.order());
      if (dump_bip)
        std::cerr << dcf::dump_bipartite(
            dcf::mark_m0(dcf::build_bipartite_rep(d), w));
      dcf::CyclableOptions opts;
      opts.mode = mode == "best-effort" ? dcf::SolveMode::best_effort
                                        : dcf::SolveMode::guaranteed;
      opts.trace = tracer;
      auto res = dcf::find_w_cycle(d, w, opts);
      if (res.cycle) {
        write_output(out_path,
                     dcf::emit_cycle(d, w, *res.cycle, parse_format(format)));
        return kExitYes;
      }
      std::cerr << "not cyclable: " << res.report->reason << "\n";
      return kExitNo;
    }

    if (t5->parsed()) {
      dcf::Digraph d = dcf::parse_digraph_file(digraph_path);
      dcf::VertexSet w = dcf::parse_w_file(w_path, d.order());
      dcf::Partition parts = dcf::parse_partition_text(parts_csv);
      auto cert = dcf::theorem5_factor(d, w, parts);
      write_output(out_path,
                   dcf::emit_certificate(d, w, cert, parse_format(format)));
      return kExitYes;
    }

    if (gen->parsed()) {
      dcf::Digraph d;
      if (gen_d1c->parsed() || gen_d2c->parsed()) {
        dcf::OrientationTable table = gen_d1c->parsed() ? dcf::default_d1_table()
                                                        : dcf::default_d2_table();
        if (!table_path.empty()) {
          std::ifstream in(table_path);
          if (!in) throw std::runtime_error("cannot open table: " + table_path);
          std::ostringstream os;
          os << in.rdbuf();
          table = dcf::parse_orientation_table(os.str());
        }
        d = gen_d1c->parsed() ? dcf::gen_d1(gk, table) : dcf::gen_d2(gk, table);
      } else if (gen_kb->parsed()) {
        d = dcf::gen_complete_bipartite_sym(ga, gb);
      } else {
        d = dcf::gen_random(gn, gp, gseed);
      }
      write_output(out_path, dcf::write_digraph_text(d));
      return kExitYes;
    }

    if (verify->parsed()) {
      dcf::Digraph d = dcf::parse_digraph_file(digraph_path);
      dcf::VertexSet w = dcf::parse_w_file(w_path, d.order());
      if (!cert_path.empty()) {
        dcf::Partition parts = dcf::parse_partition_text(parts_csv);
        auto cert = parse_certificate_json(cert_path);
        auto rep = dcf::validate_certificate(d, w, parts, cert);
        if (rep.pass) {
          std::cout << "PASS\n";
          return kExitYes;
        }
        std::cout << "FAIL\n";
        for (const auto& v : rep.violations) std::cout << v << "\n";
        return kExitNo;
      }
      if (!use_oracle)
        throw dcf::ParseError("verify needs --certificate or --oracle", 1, 1);
      if (kind == "digons") {
        bool yes = dcf::oracle_digon_factor(d);
        std::cout << (yes ? "yes" : "no") << "\n";
        return yes ? kExitYes : kExitNo;
      }
      if (kind == "cyclable") {
        auto res = dcf::oracle_cyclable(d, w, budget);
        if (res.verdict == dcf::OracleVerdict::budget_exceeded) {
          std::cerr << "budget exceeded\n";
          return kExitUsage;
        }
        std::cout << (res.verdict == dcf::OracleVerdict::yes ? "yes" : "no")
                  << "\n";
        return res.verdict == dcf::OracleVerdict::yes ? kExitYes : kExitNo;
      }
      dcf::Partition parts = dcf::parse_partition_text(parts_csv);
      auto res = dcf::oracle_factor_exists(d, w, parts, budget);
      if (res.verdict == dcf::OracleVerdict::budget_exceeded) {
        std::cerr << "budget exceeded\n";
        return kExitUsage;
      }
      std::cout << (res.verdict == dcf::OracleVerdict::yes ? "yes" : "no")
                << "\n";
      return res.verdict == dcf::OracleVerdict::yes ? kExitYes : kExitNo;
    }

    if (sweep->parsed()) {
      sweep_cfg.exhaustive = exhaustive;
      sweep_cfg.huge = huge;
      if (!sweep_cfg.exhaustive && sweep_cfg.random_count <= 0)
        throw dcf::ParseError("sweep needs --exhaustive or --random N", 1, 1);
      return run_sweep(sweep_cfg);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitUsage : kExitUsage;
  } catch (const dcf::GuaranteeViolation& e) {
    std::cerr << "internal assertion: " << e.what() << "\n";
    return kExitInternal;
  } catch (const dcf::ParseError& e) {
    std::cerr << "parse error (line " << e.line << ", col " << e.col
              << "): " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
