#pragma once

#include <chrono>

namespace sotest {

// Time source injected into anything with a runtime budget. The simulated
// variant advances a fixed amount per charged iteration, which keeps repeated
// runs of the same seed byte identical; the wall variant measures real time.
class Clock {
public:
    virtual ~Clock() = default;
    virtual double now() const = 0;       // seconds
    virtual void charge_iteration() {}    // cost of one solver iteration
};

class WallClock final : public Clock {
public:
    double now() const override {
        using namespace std::chrono;
        return duration<double>(steady_clock::now().time_since_epoch()).count();
    }
};

class SimClock final : public Clock {
public:
    explicit SimClock(double seconds_per_iteration = 1e-3)
        : cost_(seconds_per_iteration) {}

    double now() const override { return t_; }
    void charge_iteration() override { t_ += cost_; }
    void advance(double seconds) { t_ += seconds; }

private:
    double t_ = 0.0;
    double cost_;
};

}  // namespace sotest
