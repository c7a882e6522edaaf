#ifndef CROWDREP_TYPES_HPP
#define CROWDREP_TYPES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdrep {

// Dense row-major matrix, just enough for our purposes.
template <typename T>
class Grid {
public:
    Grid() : rows_(0), cols_(0) {}
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<T>& data() const { return data_; }

    std::vector<T> row(std::size_t r) const {
        return std::vector<T>(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
    }

    bool operator==(const Grid& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    std::size_t rows_, cols_;
    std::vector<T> data_;
};

using Matrix = Grid<double>;
using IntMatrix = Grid<int>;

// Per-class knowledge available to the requester: representative error
// probabilities, class sizes, per-worker load limits and the assignment budget.
struct ClassProfile {
    int num_tasks = 0;                 // T
    int num_classes = 0;               // K
    std::vector<int> class_sizes;      // W_k, k = 0..K-1
    Matrix pi;                         // T x K, entries in [0, 1/2]
    std::vector<int> worker_limits;    // r_w, one per worker
    long long budget = 0;              // C

    int total_workers() const {
        int w = 0;
        for (int s : class_sizes) w += s;
        return w;
    }

    // Class index of worker w under the canonical contiguous numbering
    // (class 0 occupies worker indices [0, W_0), then class 1, ...).
    std::vector<int> contiguous_class_of() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(total_workers()));
        for (int k = 0; k < num_classes; ++k)
            out.insert(out.end(), static_cast<std::size_t>(class_sizes[k]), k);
        return out;
    }

    void validate() const {
        if (num_tasks < 0 || num_classes <= 0)
            throw std::invalid_argument("ClassProfile: need T >= 0 and K >= 1");
        if (static_cast<int>(class_sizes.size()) != num_classes)
            throw std::invalid_argument("ClassProfile: class_sizes size mismatch");
        for (int s : class_sizes)
            if (s < 0) throw std::invalid_argument("ClassProfile: negative class size");
        if (pi.rows() != static_cast<std::size_t>(num_tasks) ||
            pi.cols() != static_cast<std::size_t>(num_classes))
            throw std::invalid_argument("ClassProfile: pi dimensions mismatch");
        for (double v : pi.data())
            if (!(v >= 0.0 && v <= 0.5))
                throw std::invalid_argument("ClassProfile: pi entry outside [0, 1/2]");
        if (static_cast<int>(worker_limits.size()) != total_workers())
            throw std::invalid_argument("ClassProfile: worker_limits size mismatch");
        for (int r : worker_limits)
            if (r < 0) throw std::invalid_argument("ClassProfile: negative worker limit");
        if (budget < 0) throw std::invalid_argument("ClassProfile: negative budget");
    }

    // Common per-worker limit; throws if workers have unequal limits.
    int uniform_limit() const {
        if (worker_limits.empty()) throw std::invalid_argument("no workers");
        for (int r : worker_limits)
            if (r != worker_limits[0])
                throw std::invalid_argument("per-worker limits are not uniform");
        return worker_limits[0];
    }
};

inline ClassProfile make_profile(int num_tasks, std::vector<int> class_sizes,
                                 Matrix pi, int worker_limit, long long budget) {
    ClassProfile p;
    p.num_tasks = num_tasks;
    p.num_classes = static_cast<int>(class_sizes.size());
    p.class_sizes = std::move(class_sizes);
    p.pi = std::move(pi);
    p.worker_limits.assign(static_cast<std::size_t>(p.total_workers()), worker_limit);
    p.budget = budget;
    p.validate();
    return p;
}

// Ground truth: per-worker, per-task error probabilities and class membership.
struct Population {
    Matrix p;                  // T x W, entries in [0, 1/2]
    std::vector<int> class_of; // worker -> class index

    int num_tasks() const { return static_cast<int>(p.rows()); }
    int num_workers() const { return static_cast<int>(p.cols()); }
};

struct TaskTruths {
    std::vector<int> tau;  // entries in {-1, +1}
};

}  // namespace crowdrep

#endif  // CROWDREP_TYPES_HPP
