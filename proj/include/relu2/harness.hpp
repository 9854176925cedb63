// Instance factories and the end-to-end reduction pipeline used by the CLI
// and the acceptance suite. All randomness flows through the caller's Rng.
#pragma once

#include "relu2/core.hpp"
#include "relu2/exact.hpp"
#include "relu2/reduce.hpp"
#include "relu2/rng.hpp"

namespace relu2::harness {

// Plants two planes and labels sampled points by the separability rule; the
// first point is the origin so S1 is never empty. Points inside the margin
// band around either plane are resampled.
reduce::SeparabilityInstance gen_separable(int n, int d, Rng& rng,
                                           reduce::TwoPlaneWitness* witness = nullptr,
                                           double margin = 0.05);

// Random points with labels drawn uniformly from {0,1}.
Dataset gen_random_labels(int n, int d, Rng& rng);

// Random points labeled by a random two-node network (arbitrary magnitudes).
Dataset gen_planted_net(int n, int d, Rng& rng, TwoReluNet* planted = nullptr);

// Random instance rejected until the exhaustive dichotomy-pair search proves
// it unseparable. Keep n small; the certificate is the exhaustive search.
reduce::SeparabilityInstance gen_unseparable_certified(int n, int d, Rng& rng);

struct PipelineOutcome {
  bool decision = false;            // zero-loss decision on the reduced dataset
  bool witness_valid = false;       // extracted planes pass the separability check
  bool exhaustive_separable = false;
  bool exhaustive_ran = false;
  bool agree = false;
  double loss = 0.0;
  unsigned long long subproblems = 0;
  bool have_witness = false;
  reduce::TwoPlaneWitness witness;
};

// normalize -> reduce -> decide -> extract -> check, with the exhaustive
// search as ground truth on small instances.
PipelineOutcome run_pipeline(const reduce::SeparabilityInstance& original,
                             exact::TrainConfig cfg, int exhaustive_max_n = 12);

}  // namespace relu2::harness
