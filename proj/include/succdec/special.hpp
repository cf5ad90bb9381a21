#pragma once

namespace succdec {

/// Gauss hypergeometric 2F1(a, b; c; z) for z in [-1, 1/2]. Negative z is
/// mapped into [0, 1/2] with the Pfaff transformation before summing the
/// series, so convergence is at least geometric with ratio 1/2.
double hyp2f1(double a, double b, double c, double z);

/// Mutual information (bits) of a binary input over a real AWGN channel
/// whose LLR is N(s^2 / 2, s^2) given the input. J(0) = 0, J(inf) = 1.
double j_function(double s);

/// Inverse of j_function on [0, 1).
double j_inverse(double info);

} // namespace succdec
