// Two-plane separability instances and the translation between them and
// zero-loss training problems: fixed extra points in two appended
// coordinates, explicit forward weight construction, hard-sorting witnesses,
// and reverse witness extraction.
#pragma once

#include "relu2/core.hpp"

#include <optional>
#include <vector>

namespace relu2::reduce {

inline constexpr double kStrictTol = 1e-9;

struct InvalidWitness : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeparabilityInstance {
  std::vector<Vec> points;
  std::vector<int> s1, s0;  // disjoint index sets covering all points; s1 nonempty
  int dim = 0;
  // Translation that was subtracted from the original coordinates, when the
  // instance has been normalized to put an s1 point at the origin.
  std::optional<Vec> shift;

  int size() const { return static_cast<int>(points.size()); }
  void validate() const;
  bool is_normalized(double tol = 1e-12) const;
};

// Translate so the lowest-index s1 point sits at the origin.
SeparabilityInstance normalize_instance(const SeparabilityInstance& inst);

struct TwoPlaneWitness {
  AffineFunction plane1, plane2;
};

// Strictly positive on both planes over S1; strictly negative on at least one
// plane for every S0 point. Margins are measured after scaling each plane to
// |alpha|_inf = 1 (degenerate planes are compared as-is).
bool check_separability(const SeparabilityInstance& inst, const TwoPlaneWitness& w,
                        double tol = kStrictTol);

// Ground truth by exhaustive search over realizable dichotomy pairs.
bool separable_exhaustive(const SeparabilityInstance& inst);

// Embed the instance in two extra coordinates and append the 12 fixed points.
// Requires a normalized instance. Labels: 1 on S1, 0 on S0, and the fixed
// points carry their own labels. Total size N + 12.
Dataset build_gadget(const SeparabilityInstance& inst);

// The 13-point fixture in d = 2: the origin labeled 1 plus the 12 fixed points.
Dataset gadget_only_dataset();

struct ForwardConstruction {
  TwoReluNet net;  // zero loss on build_gadget(inst)
  double epsilon = 0.0;
  double eta = 0.0;
};

// Valid witness -> explicit network solving the reduced training problem.
ForwardConstruction forward_construct(const SeparabilityInstance& inst,
                                      const TwoPlaneWitness& w);

enum class HardSortSide { Above, Below };

struct HardSortWitness {
  AffineFunction l1, l2;
  int w1 = 1, w2 = 1;  // in {-1,+1}
  double c = 0.0;
  HardSortSide side = HardSortSide::Above;
};

// w1[l1]+ + w2[l2]+ equals c on the pi1 points (within tol) and sits strictly
// on the claimed side of c (margin tol) everywhere else.
bool check_hard_sort(const std::vector<Vec>& points, const std::vector<int>& pi1,
                     const HardSortWitness& w, double tol = kStrictTol);

// Hard-sorting witness -> network with zero loss on labels = indicator of pi1.
TwoReluNet net_from_hard_sort(const HardSortWitness& w, const std::vector<Vec>& points,
                              const std::vector<int>& pi1);

// From a network with zero loss on build_gadget(inst) back to two separating
// planes. The witness is reported in the instance's original coordinates
// (the recorded shift, when present, is undone). Throws if the network does
// not fit within tol or the extracted planes fail the separability check.
TwoPlaneWitness extract_separability_witness(const TwoReluNet& net,
                                             const SeparabilityInstance& inst,
                                             double tol = 1e-9);

}  // namespace relu2::reduce
