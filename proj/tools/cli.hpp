#pragma once

// Command-line front end. dispatch() takes the arguments after the program
// name and returns the exit status: 0 success, 1 domain error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairdiv/fairdiv.hpp"

namespace fairdiv::cli {

namespace detail {

struct Printer {
  bool decimal = false;
  std::string operator()(const Rational& v) const { return decimal ? v.decimal(6) : v.str(); }
};

inline std::string describe(const Instance& inst, const Allocation& a) {
  std::string s;
  for (std::size_t j = 0; j < a.num_items(); ++j) {
    if (j) s += ' ';
    s += inst.item_label(j) + "->";
    s += a.owner(j) == kUnallocated ? std::string("none") : inst.agent_label(static_cast<std::size_t>(a.owner(j)));
  }
  return s;
}

inline void print_report(std::ostream& out, const Instance& inst, const Allocation& a, EnvyNormalization norm,
                         const Printer& p) {
  IndexEvaluator eval(inst);
  out << "allocation: " << describe(inst, a) << '\n';
  auto x = eval.agent_utilities(a);
  out << "utilities:";
  for (std::size_t i = 0; i < x.size(); ++i) out << ' ' << inst.agent_label(i) << '=' << p(x[i]);
  out << '\n';
  out << "gini: " << p(eval.gini(a)) << '\n';
  out << "subjective_gini: " << p(eval.subjective_gini(a)) << '\n';
  out << "envy: " << p(eval.envy(a, norm)) << '\n';
  out << "utilitarian: " << p(eval.utilitarian(a)) << '\n';
  out << "egalitarian: " << p(eval.egalitarian(a)) << '\n';
  out << "envy_free: " << (eval.envy_free(a) ? "yes" : "no") << '\n';
  out << "pareto_efficient: ";
  try {
    out << (is_pareto_efficient(inst, a) ? "yes" : "no") << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SearchSpaceTooLarge) throw;
    out << "unknown\n";
  }
}

inline std::vector<std::size_t> parse_order(const std::string& text, std::size_t items) {
  if (text.empty() || text == "given") return identity_order(items);
  std::vector<std::size_t> order;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      order.push_back(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "order entry '" + cell + "' is not an item index");
    }
  }
  return order;
}

const std::vector<std::string> kKindNames{"gini", "subjgini", "envy"};
const std::vector<std::string> kNormNames{"half", "full"};

}  // namespace detail

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair division of indivisible items: inequality indices, exact solvers, online mechanisms"};
  app.name("fairdiv");
  app.require_subcommand(1, 1);
  bool decimal = false;
  app.add_flag("--decimal", decimal, "print rationals as 6-digit decimals instead of p/q");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance with integer utilities");
  std::size_t gen_agents = 0, gen_items = 0;
  std::optional<std::uint64_t> gen_max;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--agents", gen_agents, "number of agents")->required()->check(CLI::PositiveNumber);
  gen->add_option("--items", gen_items, "number of items")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--max-util", gen_max, "largest utility (default: number of items)");
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("-o,--output", gen_out, "output file (default: stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate an allocation");
  std::string eval_instance, eval_alloc;
  std::string eval_norm = "half";
  eval->add_option("instance", eval_instance, "instance JSON")->required();
  eval->add_option("allocation", eval_alloc, "allocation JSON")->required();
  eval->add_option("--envy-norm", eval_norm, "half|full")->check(CLI::IsMember(detail::kNormNames));

  // minimize
  auto* minimize = app.add_subcommand("minimize", "exact index minimizers by enumeration");
  std::string min_instance;
  std::string min_index;
  std::string min_norm = "half";
  bool min_all = false;
  std::uint64_t min_cap = kDefaultEnumerationCap;
  minimize->add_option("instance", min_instance, "instance JSON")->required();
  minimize->add_option("--index", min_index, "gini|subjgini|envy")
      ->required()
      ->check(CLI::IsMember(detail::kKindNames));
  minimize->add_option("--envy-norm", min_norm, "half|full")->check(CLI::IsMember(detail::kNormNames));
  minimize->add_flag("--all", min_all, "print every minimizer");
  minimize->add_option("--cap", min_cap, "largest n^m to enumerate");

  // online
  auto* online = app.add_subcommand("online", "run an online mechanism");
  std::string on_instance, on_order = "given", on_trace;
  std::string on_mech;
  std::string on_norm = "half";
  std::uint64_t on_seed = 0, on_samples = 1;
  online->add_option("instance", on_instance, "instance JSON")->required();
  online->add_option("--mechanism", on_mech, "gini|subjgini|envy")
      ->required()
      ->check(CLI::IsMember(detail::kKindNames));
  online->add_option("--seed", on_seed, "random seed")->required();
  online->add_option("--order", on_order, "given|random|comma-separated item indices");
  online->add_option("--samples", on_samples, "number of sampled runs")->check(CLI::PositiveNumber);
  online->add_option("--trace", on_trace, "write the per-step trace of the first run to FILE");
  online->add_option("--envy-norm", on_norm, "half|full")->check(CLI::IsMember(detail::kNormNames));

  // support
  auto* support = app.add_subcommand("support", "exact outcome distribution of an online mechanism");
  std::string sup_instance, sup_order = "given";
  std::string sup_mech;
  std::string sup_norm = "half";
  support->add_option("instance", sup_instance, "instance JSON")->required();
  support->add_option("--mechanism", sup_mech, "gini|subjgini|envy")
      ->required()
      ->check(CLI::IsMember(detail::kKindNames));
  support->add_option("--order", sup_order, "given|comma-separated item indices");
  support->add_option("--envy-norm", sup_norm, "half|full")->check(CLI::IsMember(detail::kNormNames));

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run the mechanism comparison and write a CSV");
  std::string exp_config, exp_out;
  std::optional<unsigned> exp_threads;
  bool exp_quiet = false;
  experiment->add_option("--config", exp_config, "experiment config JSON")->required();
  experiment->add_option("-o,--output", exp_out, "CSV output file")->required();
  experiment->add_option("--threads", exp_threads, "worker threads (0: all cores)");
  experiment->add_flag("--quiet", exp_quiet, "no progress output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const detail::Printer p{decimal};
  try {
    if (*gen) {
      auto inst = generate_instance(gen_agents, gen_items, gen_max.value_or(gen_items), gen_seed);
      if (gen_out.empty()) {
        out << serialize_instance(inst);
      } else {
        save_instance(inst, gen_out);
      }
    } else if (*eval) {
      auto inst = load_instance(eval_instance);
      auto alloc = load_allocation(eval_alloc);
      detail::print_report(out, inst, alloc, parse_envy_normalization(eval_norm), p);
    } else if (*minimize) {
      auto inst = load_instance(min_instance);
      const IndexKind kind = parse_index_kind(min_index);
      std::optional<MinimizationResult> result;
      try {
        result = minimize_index(inst, kind, parse_envy_normalization(min_norm), min_cap);
      } catch (const Error& e) {
        // Square instances have a polynomial route to a zero-index allocation.
        if (e.code() != ErrorCode::SearchSpaceTooLarge || min_all || kind == IndexKind::Envy ||
            inst.num_agents() != inst.num_items()) {
          throw;
        }
        auto alloc = matching_minimizer_square(inst, kind);
        if (!alloc) throw;
        out << "value: " << p(Rational(0)) << '\n';
        out << "method: matching\n";
        out << "allocation: " << detail::describe(inst, *alloc) << '\n';
        return 0;
      }
      out << "value: " << p(result->min_value) << '\n';
      out << "minimizers: " << result->minimizers.size() << '\n';
      if (min_all) {
        for (const auto& a : result->minimizers) out << "allocation: " << detail::describe(inst, a) << '\n';
      } else {
        out << "allocation: " << detail::describe(inst, result->minimizers.front()) << '\n';
      }
    } else if (*online) {
      auto inst = load_instance(on_instance);
      const MechanismKind omech = parse_mechanism(on_mech);
      const EnvyNormalization onorm = parse_envy_normalization(on_norm);
      const std::size_t m = inst.num_items();
      const bool random = on_order == "random";
      std::optional<std::vector<std::size_t>> fixed;
      if (!random) fixed = detail::parse_order(on_order, m);
      // The first run uses the same key and order as sample 0 of the batch.
      const std::uint64_t key0 = fairdiv::detail::derive(on_seed, {fairdiv::detail::kTagSample, 0});
      auto order0 = random ? random_order(m, key0) : *fixed;
      auto trace = run_mechanism(inst, order0, omech, onorm, key0);
      if (!on_trace.empty()) {
        std::ofstream tf(on_trace, std::ios::binary);
        if (!tf) throw Error(ErrorCode::IoFailure, "cannot open '" + on_trace + "' for writing");
        write_trace(trace, tf);
      }
      if (on_samples == 1) {
        out << "order:";
        for (auto j : trace.order) out << ' ' << inst.item_label(j);
        out << '\n';
        detail::print_report(out, inst, trace.final_allocation, onorm, p);
      } else {
        std::optional<std::span<const std::size_t>> span;
        if (fixed) span = *fixed;
        auto metrics = sample_online_metrics(inst, span, omech, onorm, on_samples, on_seed);
        auto line = [&](const char* name, const RunningStat& s) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "%s: mean=%.6f sd=%.6f\n", name, s.mean(), s.stddev());
          out << buf;
        };
        out << "samples: " << on_samples << '\n';
        line("gini", metrics.gini);
        line("subjective_gini", metrics.subjective_gini);
        line("envy", metrics.envy);
        line("utilitarian", metrics.utilitarian);
        line("egalitarian", metrics.egalitarian);
      }
    } else if (*support) {
      auto inst = load_instance(sup_instance);
      auto order = detail::parse_order(sup_order, inst.num_items());
      auto outcomes = mechanism_support(inst, order, parse_mechanism(sup_mech), parse_envy_normalization(sup_norm));
      std::vector<Rational> expected(inst.num_agents());
      out << "outcomes: " << outcomes.size() << '\n';
      for (const auto& o : outcomes) {
        out << p(o.probability) << ' ' << detail::describe(inst, o.allocation) << '\n';
        for (std::size_t i = 0; i < inst.num_agents(); ++i) {
          expected[i] += o.probability *
                         bundle_utility(inst, i, o.allocation.bundle(static_cast<int>(i)), Source::Utilities);
        }
      }
      out << "expected_utilities:";
      for (std::size_t i = 0; i < expected.size(); ++i) out << ' ' << inst.agent_label(i) << '=' << p(expected[i]);
      out << '\n';
    } else if (*experiment) {
      auto config = load_experiment_config(exp_config);
      if (exp_threads) config.threads = *exp_threads;
      ProgressCallback progress;
      if (!exp_quiet) {
        progress = [&err](std::size_t done, std::size_t total) {
          err << "\r" << done << '/' << total << " instances" << (done == total ? "\n" : "") << std::flush;
        };
      }
      auto rows = run_experiment(config, progress);
      write_csv(rows, exp_out);
      for (const auto& r : rows) {
        if (!r.egalitarian_exact) {
          err << "warning: egalitarian optimum not proven for m=" << r.m << " (time budget)\n";
          break;
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace fairdiv::cli
