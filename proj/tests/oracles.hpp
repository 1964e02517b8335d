#pragma once

// Frozen reference values. Each was computed outside this code base
// (mpmath at 30 digits, or sympy exactly) and pasted here.

#include <complex>

namespace oracle {

using C = std::complex<double>;

// 2 - sqrt(3)
inline constexpr double kCritHalf = 0.267949192431122706472553658494;

// z (z - a) / (1 - conj(a) z) with a = 0.3+0.2i at z = 0.5-0.1i, value and slope
inline const C kBlaschkeValue{0.0501421555957611777060721412836, -0.202894804859136738365836886026};
inline const C kBlaschkeSlope{0.679202394843638857768356485984, -0.642750786099501526691498791243};

// 2 atanh |(z - w) / (1 - conj(w) z)| for z = 0.1, w = -0.3i
inline constexpr double kHypDist = 0.654584301788925429583772886945;

// sum_{n=1}^{5000} 1/(n+1) and sum_{n=1}^{2500} 1/(n+1)
inline constexpr double kHarmonic5000 = 8.09470881299243536758118154619;
inline constexpr double kHarmonic2500 = 7.40186150248846626807990304968;

// ((z+1/2)/(1+z/2))^2 at 1: f, f', f'', f''' (sympy, exact)
inline constexpr double kHalfMapDerivs[4] = {1.0, 2.0 / 3.0, -2.0 / 9.0, 0.0};
// ((z+1/3)/(1+z/3))^2 at 1: f .. f'''' (sympy, exact)
inline constexpr double kThirdMapDerivs[5] = {1.0, 1.0, 0.0, -3.0 / 8.0, 3.0 / 4.0};

// (2z+1)/(z+3) at 1+i, value and derivative
inline const C kMobiusValue{0.823529411764705882352941176471, 0.294117647058823529411764705882};
inline const C kMobiusDeriv{0.259515570934256055363321799308, -0.138408304498269896193771626298};

// e(z) = exp(z^2) (z + 1) at 0.3+0.4i: e' and e'''
inline const C kExpProdD1{1.03858795758053491283615678233, 1.4828403831236154767314029779};
inline const C kExpProdD3{3.58448709275481373490756638565, 11.0936627408256173777640929004};

// exp(1+i)
inline const C kExpOnePlusI{1.46869393991588515713896759732659, 2.28735528717884239120817190670062};

}  // namespace oracle
