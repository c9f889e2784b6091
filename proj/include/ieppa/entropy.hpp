#pragma once

#include "ieppa/tensor.hpp"

namespace ieppa {

// Entries of the second argument below this are a domain error.
inline constexpr double kMinPositive = 1e-300;

// phi(X) = sum x log x - x, with 0 log 0 = 0.
double Phi(const Tensor3& x);
// phi(X) - phi(Y) - <log Y, X - Y>
double Bregman(const Tensor3& x, const Tensor3& y);
// sum x log(x/y) - x + y
double Kl(const Tensor3& x, const Tensor3& y);

// Bregman(X, Y) given log Y instead of Y, so entries of Y below the double
// range still count. log_y may hold -inf, which is +inf distance unless x is 0.
double BregmanLog(const Tensor3& x, const Tensor3& log_y);

}  // namespace ieppa
