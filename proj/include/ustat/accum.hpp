#ifndef USTAT_ACCUM_HPP
#define USTAT_ACCUM_HPP

namespace ustat {

/// Kahan compensated accumulator. Summation order is the caller's; for a
/// fixed order the result is bitwise reproducible.
class KahanAccumulator {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace ustat

#endif
