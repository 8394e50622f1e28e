#pragma once

// Frozen output of tests/oracle/derive_values.py (numpy/scipy, independent of
// the library). Regenerate with that script if a definition changes.

namespace ref {

// C1 cubic Hermite taming with N = nu = 1
inline constexpr double kTamingAt1_5 = 0.375;
inline constexpr double kTamingAt1_25 = 0.109375;
inline constexpr double kTamingAt1_75 = 0.703125;
inline constexpr double kTamingSlopeAt1_5 = 1.25;

// x' = x - n (x - 1)^+ from x0 = 0.5 on [0, 1], LSODA at rtol 1e-12
inline constexpr double kHitTime = 0.69314718055994529;
struct OutwardRow {
  double n, terminal, total_variation, var2;
};
inline constexpr OutwardRow kOutward[] = {
    {100, 1.0101010101010091, 0.29974930236423514, 0.089849644267845655},
    {400, 1.0025062656641601, 0.30510932709532568, 0.093091701480562436},
    {1000, 1.0010010010010011, 0.30615797641702097, 0.093732706523765169},
    {1600, 1.0006253908692933, 0.30641894041001838, 0.093892567041998401},
    {6400, 1.0001562744178778, 0.30674447384774212, 0.094092172236128147},
    {10000, 1.000100010001, 0.30678348778932418, 0.094116108380182417},
};
// E sup_t |X^lo - X^hi|^2 for lo -> 4 lo, same ODE
inline constexpr double kOutwardCauchy[] = {5.7680143061047807e-05, 3.5376899939654956e-06,
                                            2.2007024499362626e-07};

// Euler on x' = -x, dt 1e-3, 1000 steps, initial difference 1e-3
inline constexpr double kContractedEuler = 0.00036769542477096376;
inline constexpr double kContractedOde = 0.00036787944117144236;

// Allen-Cahn, 64 modes, K = 129, q = 0.01 (1 + k^2)^-1, mu = 1:
// sum_k q_k mu^2, and the coercivity constant max(4, that)
inline constexpr double kAllenCahnNoiseBound = 0.031223434478480139;
inline constexpr double kAllenCahnC0 = 4.0;

}  // namespace ref
