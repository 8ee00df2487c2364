// SPDX-License-Identifier: Apache-2.0
//
// risim - RIS-aided mmWave radar imaging simulator and reconstruction toolkit
// Copyright (C) 2026 The risim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISIM_MATRIX_HPP
#define RISIM_MATRIX_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace risim
{
    // Dense row-major 2D array.
    template <typename T>
    class Matrix
    {
    public:
        Matrix() = default;
        Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
        Matrix(std::size_t rows, std::size_t cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data))
        {
            if (data_.size() != rows * cols)
                throw std::invalid_argument("Matrix: data size does not match dimensions");
        }

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        std::size_t size() const { return data_.size(); }
        bool empty() const { return data_.empty(); }

        T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
        std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

        std::vector<T> &data() { return data_; }
        const std::vector<T> &data() const { return data_; }

        friend bool operator==(const Matrix &, const Matrix &) = default;

    private:
        std::size_t rows_ = 0, cols_ = 0;
        std::vector<T> data_;
    };
}

#endif
