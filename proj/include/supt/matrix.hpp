#pragma once

#include <vector>

#include "supt/grassmann.hpp"

namespace supt {

template <typename T>
class Mat {
public:
    Mat(int rows, int cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& at(int i, int j) { return data_[i * cols_ + j]; }
    const T& at(int i, int j) const { return data_[i * cols_ + j]; }

private:
    int rows_, cols_;
    std::vector<T> data_;
};

using GrassmannMatrix = Mat<GrassmannElement>;

GrassmannMatrix grassmann_identity(int m, int k);
GrassmannMatrix operator*(const GrassmannMatrix& a, const GrassmannMatrix& b);
GrassmannMatrix operator+(const GrassmannMatrix& a, const GrassmannMatrix& b);
GrassmannMatrix operator-(const GrassmannMatrix& a, const GrassmannMatrix& b);
GrassmannMatrix operator*(double s, const GrassmannMatrix& a);
GrassmannVector operator*(const GrassmannMatrix& a, const GrassmannVector& v);
double max_abs(const GrassmannMatrix& a);

// Inverse through the body: E = B(I + N) with N nilpotent, so
// E^{-1} = (sum (-N)^m) B^{-1}. Throws if the body matrix is singular.
GrassmannMatrix grassmann_inverse(const GrassmannMatrix& a);

// Condition number estimate (max-norm) of the body matrix.
double body_condition_number(const GrassmannMatrix& a);

}  // namespace supt
