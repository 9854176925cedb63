// Command-line front end: dataset/instance generation, the reduction, exact
// and over-parameterized training, witness checking, and reporting.
#include <CLI11.hpp>
#include <json.hpp>

#include "relu2/exact.hpp"
#include "relu2/geometry.hpp"
#include "relu2/harness.hpp"
#include "relu2/interp.hpp"
#include "relu2/io.hpp"
#include "relu2/reduce.hpp"
#include "relu2/rng.hpp"

#include <chrono>
#include <iostream>
#include <thread>

namespace {

using nlohmann::json;
using namespace relu2;

constexpr int kExitDecisionFalse = 2;
constexpr int kExitBudget = 3;

struct Global {
  uint64_t seed = 1;
  double tol = 1e-8;
  int threads = 0;  // 0 = pick from hardware
  std::string report_path;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(8u, std::max(1u, hw)));
}

class Timer {
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
};

void write_report(const Global& g, const std::string& command,
                  const std::vector<std::string>& inputs, double wall_s,
                  const json& outcome) {
  if (g.report_path.empty()) return;
  json j;
  j["command"] = command;
  j["inputs"] = json::object();
  for (const auto& p : inputs) j["inputs"][p] = io::file_digest_hex(p);
  j["seed"] = g.seed;
  j["wall_time_s"] = wall_s;
  j["outcome"] = outcome;
  std::ofstream f(g.report_path);
  if (!f) throw std::runtime_error("cannot write report " + g.report_path);
  f << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and constructive training tools for small ReLU networks"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--seed", g.seed, "seed for all randomness")->capture_default_str();
  app.add_option("--tol", g.tol, "numeric tolerance")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = auto)")->capture_default_str();
  app.add_option("--report", g.report_path, "write a JSON run report here");

  // generate
  auto* gen = app.add_subcommand("generate", "write synthetic datasets and instances");
  std::string gen_kind, gen_out, gen_witness_out, gen_net_out;
  int gen_n = 8, gen_d = 2;
  gen->add_option("--kind", gen_kind, "separable | random-labels | gadget-only | planted-net")
      ->required();
  gen->add_option("--n", gen_n, "number of points")->capture_default_str();
  gen->add_option("--d", gen_d, "dimension")->capture_default_str();
  gen->add_option("--out", gen_out, "output file (CSV dataset or JSON instance)")->required();
  gen->add_option("--witness-out", gen_witness_out, "also write the planted witness (separable)");
  gen->add_option("--net-out", gen_net_out, "also write the planted network (planted-net)");

  // reduce
  auto* red = app.add_subcommand("reduce", "instance -> labeled dataset in d+2 dimensions");
  std::string red_in, red_out;
  red->add_option("instance", red_in, "instance JSON")->required();
  red->add_option("--out", red_out, "output dataset CSV")->required();

  // train-exact
  auto* tr = app.add_subcommand("train-exact", "globally optimal two-node training");
  std::string tr_in, tr_out;
  bool tr_decision = false, tr_refine = false;
  unsigned long long tr_budget = 10'000'000ULL;
  int tr_max_dim = 3;
  uint64_t tr_order_seed = 0;
  tr->add_option("dataset", tr_in, "dataset CSV")->required();
  tr->add_flag("--decision", tr_decision, "zero-loss decision only (exit 2 when false)");
  tr->add_option("--budget", tr_budget, "subproblem budget")->capture_default_str();
  tr->add_option("--max-dim", tr_max_dim, "dimension cap")->capture_default_str();
  tr->add_option("--order-seed", tr_order_seed, "permute the enumeration processing order");
  tr->add_flag("--refine-theta", tr_refine, "report a post-hoc scalar rescale of theta");
  tr->add_option("--out", tr_out, "write the trained network JSON");

  // fit-nrelu
  auto* fit = app.add_subcommand("fit-nrelu", "interpolate binary labels, one node per point");
  std::string fit_in, fit_out;
  bool fit_check = false;
  fit->add_option("dataset", fit_in, "dataset CSV")->required();
  fit->add_option("--out", fit_out, "write the fitted network JSON");
  fit->add_flag("--check-invariants", fit_check, "assert the sweep invariants every step");

  // check-hardsort
  auto* chs = app.add_subcommand("check-hardsort", "verify a hard-sorting witness");
  std::string chs_data, chs_witness;
  chs->add_option("dataset", chs_data, "dataset CSV (class 1 = label-1 points)")->required();
  chs->add_option("witness", chs_witness, "witness JSON")->required();

  // extract-witness
  auto* ext = app.add_subcommand("extract-witness", "zero-loss network -> two planes");
  std::string ext_net, ext_inst, ext_out;
  ext->add_option("net", ext_net, "network JSON")->required();
  ext->add_option("instance", ext_inst, "instance JSON")->required();
  ext->add_option("--out", ext_out, "write the witness JSON");

  // enum-dichotomies
  auto* enu = app.add_subcommand("enum-dichotomies", "hyperplane sign patterns of a point set");
  std::string enu_in, enu_signs_out;
  bool enu_print = false;
  enu->add_option("dataset", enu_in, "dataset CSV (labels ignored)")->required();
  enu->add_flag("--print-signs", enu_print, "print the sign matrix as CSV");
  enu->add_option("--signs-out", enu_signs_out, "write the sign matrix CSV here");

  // pipeline
  auto* pip = app.add_subcommand("pipeline", "reduce, decide, extract, cross-check");
  std::string pip_in;
  unsigned long long pip_budget = 1'000'000'000ULL;
  pip->add_option("instance", pip_in, "instance JSON")->required();
  pip->add_option("--budget", pip_budget, "subproblem budget")->capture_default_str();

  // verify
  auto* ver = app.add_subcommand("verify", "check a network against a dataset");
  std::string ver_net, ver_data;
  ver->add_option("net", ver_net, "network JSON")->required();
  ver->add_option("dataset", ver_data, "dataset CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    Timer timer;
    if (gen->parsed()) {
      Rng rng(g.seed);
      json outcome;
      outcome["kind"] = gen_kind;
      if (gen_kind == "separable") {
        reduce::TwoPlaneWitness w;
        const auto inst = harness::gen_separable(gen_n, gen_d, rng, &w);
        io::write_instance_json(inst, gen_out);
        if (!gen_witness_out.empty()) io::write_plane_witness_json(w, gen_witness_out);
        outcome["n"] = inst.size();
        outcome["witness_checks"] = reduce::check_separability(inst, w);
      } else if (gen_kind == "random-labels") {
        io::write_dataset_csv(harness::gen_random_labels(gen_n, gen_d, rng), gen_out);
        outcome["n"] = gen_n;
      } else if (gen_kind == "gadget-only") {
        io::write_dataset_csv(reduce::gadget_only_dataset(), gen_out);
        outcome["n"] = 13;
      } else if (gen_kind == "planted-net") {
        TwoReluNet planted;
        const auto ds = harness::gen_planted_net(gen_n, gen_d, rng, &planted);
        io::write_dataset_csv(ds, gen_out);
        if (!gen_net_out.empty()) io::write_net_json(planted, gen_net_out);
        outcome["n"] = gen_n;
      } else {
        throw CLI::ValidationError("--kind", "unknown kind '" + gen_kind + "'");
      }
      write_report(g, "generate", {}, timer.seconds(), outcome);
      return 0;
    }

    if (red->parsed()) {
      const auto inst = io::read_instance_json(red_in);
      const auto normalized = reduce::normalize_instance(inst);
      const auto ds = reduce::build_gadget(normalized);
      io::write_dataset_csv(ds, red_out);
      json outcome;
      outcome["n_out"] = ds.size();
      outcome["dim_out"] = ds.dim;
      write_report(g, "reduce", {red_in}, timer.seconds(), outcome);
      return 0;
    }

    if (tr->parsed()) {
      const auto ds = io::read_dataset_csv(tr_in);
      exact::TrainConfig cfg;
      cfg.tol = g.tol;
      cfg.budget = tr_budget;
      cfg.max_dim = tr_max_dim;
      cfg.threads = resolve_threads(g.threads);
      cfg.order_seed = tr_order_seed;
      cfg.refine_theta = tr_refine;

      json outcome;
      int code = 0;
      if (tr_decision) {
        const auto dec = exact::decide_trainability(ds, g.tol, cfg);
        outcome["trainable"] = dec.trainable;
        outcome["loss"] = dec.detail.loss;
        outcome["subproblems"] = dec.detail.subproblems;
        outcome["certificate"] = dec.detail.certificate;
        if (dec.net && !tr_out.empty()) io::write_net_json(*dec.net, tr_out);
        std::cout << (dec.trainable ? "trainable" : "not-trainable")
                  << " loss=" << dec.detail.loss << "\n";
        code = dec.trainable ? 0 : kExitDecisionFalse;
      } else {
        const auto res = exact::train_exact(ds, cfg);
        outcome["loss"] = res.loss;
        outcome["subproblems"] = res.subproblems;
        outcome["certificate"] = res.certificate;
        outcome["max_constraints"] = res.max_constraints;
        outcome["variables"] = res.variables;
        if (cfg.refine_theta) {
          outcome["refined_theta"] = res.refined_theta;
          outcome["refined_loss"] = res.refined_loss;
        }
        if (!tr_out.empty()) io::write_net_json(res.net, tr_out);
        std::cout << "loss=" << res.loss << " subproblems=" << res.subproblems
                  << " certificate=" << (res.certificate ? "yes" : "no") << "\n";
      }
      write_report(g, "train-exact", {tr_in}, timer.seconds(), outcome);
      return code;
    }

    if (fit->parsed()) {
      const auto ds = io::read_dataset_csv(fit_in);
      interp::FitOptions opt;
      opt.check_invariants = fit_check;
      const auto res = interp::fit_overparam(ds, g.seed, opt);
      const double err = max_abs_error(res.net, ds);
      if (!fit_out.empty()) io::write_net_json(res.net, fit_out);
      json outcome;
      outcome["nodes"] = res.net.nodes.size();
      outcome["max_error"] = err;
      outcome["attempts"] = res.attempts;
      std::cout << "nodes=" << res.net.nodes.size() << " max_error=" << err << "\n";
      write_report(g, "fit-nrelu", {fit_in}, timer.seconds(), outcome);
      return 0;
    }

    if (chs->parsed()) {
      const auto ds = io::read_dataset_csv(chs_data);
      const auto w = io::read_hardsort_json(chs_witness);
      std::vector<Vec> pts;
      for (const auto& p : ds.points) pts.push_back(p.x);
      const auto pi1 = ds.ones();
      const bool ok = reduce::check_hard_sort(pts, pi1, w, g.tol);
      json outcome;
      outcome["hard_sorted"] = ok;
      std::cout << (ok ? "hard-sorted" : "not-hard-sorted") << "\n";
      write_report(g, "check-hardsort", {chs_data, chs_witness}, timer.seconds(), outcome);
      return ok ? 0 : kExitDecisionFalse;
    }

    if (ext->parsed()) {
      const auto any = io::read_net_json(ext_net);
      if (!std::holds_alternative<TwoReluNet>(any))
        throw std::runtime_error("extract-witness needs a two-node network");
      const auto inst = io::read_instance_json(ext_inst);
      const auto normalized = reduce::normalize_instance(inst);
      const auto w =
          reduce::extract_separability_witness(std::get<TwoReluNet>(any), normalized, g.tol);
      const bool valid = reduce::check_separability(inst, w);
      if (!ext_out.empty()) io::write_plane_witness_json(w, ext_out);
      json outcome;
      outcome["witness_valid"] = valid;
      std::cout << (valid ? "witness-valid" : "witness-invalid") << "\n";
      write_report(g, "extract-witness", {ext_net, ext_inst}, timer.seconds(), outcome);
      return valid ? 0 : 1;
    }

    if (enu->parsed()) {
      const auto ds = io::read_dataset_csv(enu_in);
      std::vector<Vec> pts;
      for (const auto& p : ds.points) pts.push_back(p.x);
      const auto dichotomies = geometry::enumerate_dichotomies(pts, ds.dim);
      std::cout << dichotomies.size() << "\n";
      auto print_signs = [&](std::ostream& os) {
        for (const auto& dch : dichotomies) {
          for (size_t i = 0; i < dch.signs.size(); ++i)
            os << (i ? "," : "") << int(dch.signs[i]);
          os << "\n";
        }
      };
      if (enu_print) print_signs(std::cout);
      if (!enu_signs_out.empty()) {
        std::ofstream f(enu_signs_out);
        if (!f) throw std::runtime_error("cannot write " + enu_signs_out);
        print_signs(f);
      }
      json outcome;
      outcome["count"] = dichotomies.size();
      write_report(g, "enum-dichotomies", {enu_in}, timer.seconds(), outcome);
      return 0;
    }

    if (pip->parsed()) {
      const auto inst = io::read_instance_json(pip_in);
      exact::TrainConfig cfg;
      cfg.tol = g.tol;
      cfg.budget = pip_budget;
      cfg.threads = resolve_threads(g.threads);
      const auto out = harness::run_pipeline(inst, cfg);
      json outcome;
      outcome["decision"] = out.decision;
      outcome["witness_valid"] = out.witness_valid;
      outcome["exhaustive_ran"] = out.exhaustive_ran;
      outcome["exhaustive_separable"] = out.exhaustive_separable;
      outcome["agree"] = out.agree;
      outcome["loss"] = out.loss;
      outcome["subproblems"] = out.subproblems;
      std::cout << "decision=" << out.decision << " witness_valid=" << out.witness_valid
                << " exhaustive=" << out.exhaustive_separable << " agree=" << out.agree << "\n";
      write_report(g, "pipeline", {pip_in}, timer.seconds(), outcome);
      return out.agree ? 0 : 1;
    }

    if (ver->parsed()) {
      const auto ds = io::read_dataset_csv(ver_data);
      const auto any = io::read_net_json(ver_net);
      double err = 0.0;
      bool ok = false;
      size_t nodes = 0;
      if (std::holds_alternative<TwoReluNet>(any)) {
        err = max_abs_error(std::get<TwoReluNet>(any), ds);
        ok = err <= g.tol;
        nodes = 2;
      } else {
        const auto& net = std::get<KReluNet>(any);
        err = max_abs_error(net, ds);
        nodes = net.nodes.size();
        ok = interp::verify_interpolation(net, ds, g.tol);
      }
      json outcome;
      outcome["max_error"] = err;
      outcome["nodes"] = nodes;
      outcome["verified"] = ok;
      std::cout << (ok ? "verified" : "failed") << " max_error=" << err << "\n";
      write_report(g, "verify", {ver_net, ver_data}, timer.seconds(), outcome);
      return ok ? 0 : kExitDecisionFalse;
    }
  } catch (const exact::BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
