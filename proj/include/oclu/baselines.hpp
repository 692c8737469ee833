#pragma once

// Classical clustering baselines over raw 2-D point coordinates.

#include <cstdint>
#include <span>
#include <vector>

#include "oclu/clustering.hpp"
#include "oclu/rng.hpp"
#include "oclu/stimuli.hpp"

namespace oclu {

// ---------------------------------------------------------------- k-means

struct KMeansResult {
  ClusteringResult result;
  std::vector<Point> centers;  // indexed by label
  double sse = 0.0;
  // SSE after every Lloyd iteration of the winning restart.
  std::vector<double> sse_trace;
};

// Lloyd iterations from k-means++ seeding; best of `restarts` by SSE.
// Empty clusters are reseeded at the point farthest from its center.
KMeansResult kmeans(std::span<const Point> points, int k, int restarts, Rng& rng,
                    int max_iterations = 300);

// Same algorithm on rows of an n x d row-major matrix (spectral embeddings).
std::vector<int> kmeans_rows(std::span<const double> rows, std::size_t dims, int k, int restarts,
                             Rng& rng, int max_iterations = 300);

// ------------------------------------------------------- fuzzy c-means

struct FuzzyCMeansParams {
  double fuzziness = 2.0;
  double tolerance = 1e-5;
  int max_iterations = 300;
};

struct FuzzyCMeansResult {
  ClusteringResult result;
  std::vector<double> memberships;  // n x k row-major, rows sum to 1
  std::vector<Point> centers;
  int iterations = 0;
};

FuzzyCMeansResult fuzzy_cmeans(std::span<const Point> points, int k,
                               const FuzzyCMeansParams& params, Rng& rng);

// Membership update for fixed centers: n x k row-major, rows sum to 1. A
// point on a center takes membership 1 there.
std::vector<double> fcm_memberships(std::span<const Point> points, std::span<const Point> centers,
                                    double fuzziness);

// ---------------------------------------------------- spectral methods

enum class SigmaRule { Fixed, MedianHeuristic };

struct AffinityParams {
  double sigma = 1.0;                  // used when rule == Fixed
  SigmaRule rule = SigmaRule::MedianHeuristic;
  double median_factor = 0.15;         // sigma = factor * median distance

  double resolve(std::span<const Point> points) const;
};

enum class EigenSolver { Jacobi, Tridiagonal };

struct SpectralOptions {
  EigenSolver solver = EigenSolver::Tridiagonal;
  // Larger inputs are clustered on a uniform subsample and the labels are
  // propagated back by nearest neighbor.
  std::size_t max_points = 1500;
};

// Dense symmetric RBF affinity exp(-d^2 / 2 sigma^2) with zero diagonal.
std::vector<double> rbf_affinity(std::span<const Point> points, double sigma);

// Ng-Jordan-Weiss: top-k eigenvectors of D^-1/2 W D^-1/2, unit-length rows,
// k-means on the rows.
ClusteringResult spectral_njw(std::span<const Point> points, int k, const AffinityParams& affinity,
                              Rng& rng, const SpectralOptions& options = {});

// Shi-Malik recursive two-way normalized cut.
ClusteringResult normalized_cut(std::span<const Point> points, int k,
                                const AffinityParams& affinity, Rng& rng,
                                const SpectralOptions& options = {});

// Ncut(A, B) = cut/assoc(A) + cut/assoc(B) for a boolean side assignment
// over a dense n x n affinity.
double ncut_value(std::span<const double> affinity, std::size_t n, const std::vector<bool>& side);

// ------------------------------------------------------------ mean shift

struct MeanShiftResult {
  ClusteringResult result;
  std::vector<Point> modes;  // merged modes, indexed by label
};

// Flat-kernel mode seeking of radius `bandwidth` from every point; modes
// within bandwidth/2 merge. The number of clusters is found, not given.
MeanShiftResult mean_shift(std::span<const Point> points, double bandwidth,
                           int max_iterations = 500);

// ---------------------------------------------------------------- CFSFDP

struct DensityPeaks {
  std::vector<double> rho;
  std::vector<double> delta;
  // Index of the nearest point of higher density; the density maximum
  // points to itself.
  std::vector<std::size_t> nearest_higher;
};

struct CfsfdpParams {
  int centers = 1;
  // Cutoff distance in px; when <= 0 it is the `percentile` quantile of the
  // pairwise distances.
  double cutoff = 0.0;
  double percentile = 0.02;

  double resolve_cutoff(std::span<const Point> points) const;
};

// Gaussian-kernel density rho_i = sum_{j != i} exp(-(d_ij / d_c)^2) and
// separation delta_i. Equal densities are ordered by index, lower first.
DensityPeaks density_peaks(std::span<const Point> points, double cutoff);

struct CfsfdpResult {
  ClusteringResult result;
  DensityPeaks peaks;
  std::vector<std::size_t> center_indices;  // center of label i at position i
};

CfsfdpResult cfsfdp(std::span<const Point> points, const CfsfdpParams& params);

// --------------------------------------------------------------- helpers

std::vector<double> pairwise_distances(std::span<const Point> points);
double median_pairwise_distance(std::span<const Point> points);

}  // namespace oclu
