#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kdefft {

/// Dense d-dimensional array, row-major (last index contiguous).
template <typename T>
class NdArray {
public:
    NdArray() = default;

    explicit NdArray(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
        strides_.resize(shape_.size());
        std::size_t s = 1;
        for (std::size_t k = shape_.size(); k-- > 0;) {
            strides_[k] = s;
            s *= shape_[k];
        }
        data_.assign(s, T{});
    }

    std::size_t rank() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    const std::vector<std::size_t>& strides() const { return strides_; }
    std::size_t size() const { return data_.size(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](std::size_t flat) { return data_[flat]; }
    const T& operator[](std::size_t flat) const { return data_[flat]; }

    std::size_t offset(std::span<const std::size_t> idx) const {
        std::size_t o = 0;
        for (std::size_t k = 0; k < strides_.size(); ++k) o += idx[k] * strides_[k];
        return o;
    }

    T& at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
    const T& at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

    /// Odometer step over `shape`; returns false once idx wraps back to all zeros.
    static bool next_index(std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
        for (std::size_t k = shape.size(); k-- > 0;) {
            if (++idx[k] < shape[k]) return true;
            idx[k] = 0;
        }
        return false;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<T> data_;
};

}  // namespace kdefft
