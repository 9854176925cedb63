#include "relu2/harness.hpp"

#include <algorithm>
#include <cmath>

namespace relu2::harness {

reduce::SeparabilityInstance gen_separable(int n, int d, Rng& rng,
                                           reduce::TwoPlaneWitness* witness,
                                           double margin) {
  if (n < 1 || d < 1) throw std::invalid_argument("instance needs n >= 1, d >= 1");
  reduce::TwoPlaneWitness w;
  w.plane1 = {rng.unit_vector(d), rng.uniform(0.2, 1.0)};
  w.plane2 = {rng.unit_vector(d), rng.uniform(0.2, 1.0)};

  reduce::SeparabilityInstance inst;
  inst.dim = d;
  inst.points.push_back(Vec::Zero(d));  // both offsets are positive
  inst.s1.push_back(0);

  bool have_s0 = false;
  for (int i = 1; i < n; ++i) {
    Vec x;
    double v1 = 0.0, v2 = 0.0;
    for (int tries = 0;; ++tries) {
      x = 1.5 * rng.gaussian_vec(d);
      if (tries > 200) {  // force a point deep on the negative side of plane 1
        x = -(w.plane1.beta + 1.0) * w.plane1.alpha;
      }
      v1 = w.plane1(x);
      v2 = w.plane2(x);
      if (v1 >= margin && v2 >= margin) break;
      if (std::min(v1, v2) <= -margin) break;
      if (tries > 200) break;
    }
    if (v1 >= margin && v2 >= margin) {
      inst.s1.push_back(i);
    } else {
      inst.s0.push_back(i);
      have_s0 = true;
    }
    inst.points.push_back(std::move(x));
  }
  if (n > 1 && !have_s0) {
    // Replace the last point so the instance exercises both classes.
    inst.points.back() = -(w.plane1.beta + 1.0) * w.plane1.alpha;
    inst.s1.erase(std::remove(inst.s1.begin(), inst.s1.end(), n - 1), inst.s1.end());
    inst.s0.push_back(n - 1);
  }
  inst.validate();
  if (witness) *witness = w;
  return inst;
}

Dataset gen_random_labels(int n, int d, Rng& rng) {
  Dataset ds;
  ds.dim = d;
  for (int i = 0; i < n; ++i) {
    LabeledPoint p;
    p.x = Vec(d);
    for (int j = 0; j < d; ++j) p.x[j] = rng.uniform();
    p.y = rng.uniform() < 0.5 ? 0.0 : 1.0;
    ds.points.push_back(std::move(p));
  }
  ds.validate();
  return ds;
}

Dataset gen_planted_net(int n, int d, Rng& rng, TwoReluNet* planted) {
  if (n < 1) throw std::invalid_argument("planted dataset needs at least one point");
  TwoReluNet net;
  net.a1 = {rng.gaussian_vec(d), rng.uniform(-1.0, 1.0)};
  net.a2 = {rng.gaussian_vec(d), rng.uniform(-1.0, 1.0)};
  net.w1 = rng.uniform() < 0.5 ? -1 : 1;
  net.w2 = rng.uniform() < 0.5 ? -1 : 1;
  net.w0 = rng.uniform(-0.5, 1.0);
  net.theta = rng.uniform(0.5, 2.0);
  Dataset ds;
  ds.dim = d;
  for (int i = 0; i < n; ++i) {
    LabeledPoint p;
    p.x = rng.gaussian_vec(d);
    p.y = net.eval(p.x);
    ds.points.push_back(std::move(p));
  }
  ds.validate();
  if (planted) *planted = net;
  return ds;
}

reduce::SeparabilityInstance gen_unseparable_certified(int n, int d, Rng& rng) {
  if (n < 3) throw std::invalid_argument("unseparable instances need at least 3 points");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    reduce::SeparabilityInstance inst;
    inst.dim = d;
    for (int i = 0; i < n; ++i) inst.points.push_back(rng.gaussian_vec(d));
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.5) inst.s1.push_back(i);
      else inst.s0.push_back(i);
    }
    if (inst.s1.empty() || inst.s0.empty()) continue;
    if (!reduce::separable_exhaustive(inst)) return inst;
  }
  throw std::runtime_error("failed to draw an unseparable instance");
}

PipelineOutcome run_pipeline(const reduce::SeparabilityInstance& original,
                             exact::TrainConfig cfg, int exhaustive_max_n) {
  original.validate();
  PipelineOutcome out;
  const auto normalized = reduce::normalize_instance(original);
  const Dataset reduced = reduce::build_gadget(normalized);
  cfg.max_dim = std::max(cfg.max_dim, reduced.dim);
  const auto dec = exact::decide_trainability(reduced, cfg.tol, cfg);
  out.decision = dec.trainable;
  out.loss = dec.detail.loss;
  out.subproblems = dec.detail.subproblems;
  if (dec.trainable && dec.net) {
    try {
      out.witness = reduce::extract_separability_witness(*dec.net, normalized, cfg.tol);
      out.have_witness = true;
      out.witness_valid = reduce::check_separability(original, out.witness);
    } catch (const std::exception&) {
      out.witness_valid = false;
    }
  }
  if (original.size() <= exhaustive_max_n) {
    out.exhaustive_ran = true;
    out.exhaustive_separable = reduce::separable_exhaustive(original);
    out.agree = (out.decision == out.exhaustive_separable) &&
                (out.witness_valid == out.decision);
  } else {
    out.agree = out.witness_valid == out.decision;
  }
  return out;
}

}  // namespace relu2::harness
