#pragma once

#include <cmath>
#include <span>

namespace lumen {

/// Neumaier-compensated running sum. Results depend only on the order values
/// are added in, so a fixed order gives bit-identical totals.
class CompensatedSum
{
public:
    void add(double value)
    {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            compensation_ += (sum_ - t) + value;
        else
            compensation_ += (value - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double value)
    {
        add(value);
        return *this;
    }

    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> values)
{
    CompensatedSum s;
    for (double v : values)
        s.add(v);
    return s.value();
}

} // namespace lumen
