#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "succdec/fsmc.hpp"

namespace succdec {

/// Hilbert projective metric ln(max u/v) - ln(min u/v) between positive vectors.
double hilbert_metric(std::span<const double> u, std::span<const double> v);

/// Birkhoff coefficient (1 - sqrt(phi)) / (1 + sqrt(phi)), phi the smallest
/// cross ratio P_ik P_jl / (P_jk P_il). Throws if any entry is below 1e-300.
double birkhoff_tau(const SquareMatrix &p);

/// max over column pairs of d(p_i, p_j).
double max_column_metric(const SquareMatrix &p);

/// Upper bound on C - R for a K-level rectangular interleaver (bits):
/// max_column_metric / ln 2 * tau^(K-2).
double theorem1_bound(const SquareMatrix &p, int levels);

/// Upper bound on C_k - R_k for a random-interleaver level of weight w:
/// a w / (1 - tau (1 - w)) with a = max_column_metric / ln 2.
double lemma2_gap_bound(const SquareMatrix &p, double weight);

struct ContractionRow {
  int levels = 0;
  double bound = 0;
  double measured_gap = 0;
  double gap_stderr = 0;
};

struct ContractionReport {
  double tau = 0;
  double max_pair_metric = 0;
  std::vector<ContractionRow> rows;

  double bound(int levels) const;
  void write_csv(std::ostream &os) const;
};

ContractionReport contraction_report(const SquareMatrix &p);

} // namespace succdec
