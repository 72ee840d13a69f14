#pragma once

#include <vector>

#include "flocklab/array.hpp"
#include "flocklab/state.hpp"

namespace flocklab {

/// Group dispersion of positions (X) and velocities (V).
struct DispersionPair {
  double X;
  double V;
};

/// Mean vector over agents, one entry per component.
std::vector<double> mean_vector(const AgentArray& a);

/// a_i - mean(a) for every agent.
AgentArray deviations(const AgentArray& a);

/// Mean squared deviation (1/N) sum_i ||a_i - abar||^2. This is the form the
/// hot paths use.
double mean_square_deviation(const AgentArray& a);

/// (1/(2N^2)) sum_ij ||a_i - a_j||^2, by the direct double loop. Equal to
/// mean_square_deviation up to roundoff; kept as an independent cross-check.
double pairwise_dispersion(const AgentArray& a);

/// X and V for a state, deviation form.
DispersionPair dispersion(const FlockState& s);

/// X and V by the pairwise double loop.
DispersionPair dispersion_pairwise(const FlockState& s);

/// max_ij ||a_i - a_j||. Never exceeds sqrt(2*N*msd(a)).
double max_pairwise_distance(const AgentArray& a);

/// Both sides of the symmetric-weights rearrangement
///   (1/N^2) sum_ij w_ij <a_j - a_i, a_i> = -(1/(2N^2)) sum_ij w_ij ||a_i - a_j||^2,
/// each computed by its own double loop. Throws std::invalid_argument when the
/// weight matrix is not symmetric or shapes disagree.
struct QuadraticFormSides {
  double lhs;
  double rhs;
};
QuadraticFormSides weighted_alignment_quadratic(const SquareMatrix& w, const AgentArray& a);

}  // namespace flocklab
