#pragma once

#include "ttss/tensor_train.hpp"

namespace ttss::detail {

void thin_qr(const Matrix& a, Matrix& q, Matrix& r);

// Smallest r >= 1 whose discarded singular-value tail is <= abs_tol, capped.
int truncation_rank(const Vector& s, double abs_tol, int max_rank);

void check_same_modes(const std::vector<int>& a, const std::vector<int>& b, const char* what);

// Operator cores viewed as vector cores with merged (row, col) mode.
TTVector as_vector(const TTOperator& op);
TTOperator as_operator(const TTVector& v, const std::vector<int>& m, const std::vector<int>& n);

}  // namespace ttss::detail
