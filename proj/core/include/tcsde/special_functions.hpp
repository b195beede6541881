#pragma once

namespace tcsde {

// log Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms), about
// 1e-14 absolute accuracy over the range used here.
double log_gamma(double x);

// sin(pi*x) with the argument reduced in exact double arithmetic, so it is
// exactly 0 at integers and keeps full relative accuracy for large x.
double sin_pi(double x);

}  // namespace tcsde
