#pragma once

namespace taumax {

/// Physicists' Hermite polynomial H_i(q) from H_0 = 1, H_1 = 2q and
/// H_i = 2q H_{i-1} - 2(i-1) H_{i-2} (the same recurrence written with the
/// derivative H'_{i-1} = 2(i-1) H_{i-2}). Throws ConfigError for i < 0.
double hermite_eval(int i, double q);

}  // namespace taumax
