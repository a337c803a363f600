#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "robustmean/errors.hpp"
#include "robustmean/vec.hpp"

namespace robustmean {

// Ordered, immutable collection of N samples in R^d. Construction rejects
// empty sets, ragged dimensions and non-finite coordinates.
class SampleSet {
public:
    explicit SampleSet(std::vector<Vec> points) : points_(std::move(points)) {
        if (points_.empty()) throw invalid_parameter("SampleSet: need at least one sample");
        dim_ = points_[0].size();
        if (dim_ == 0) throw invalid_parameter("SampleSet: dimension must be >= 1");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (points_[i].size() != dim_)
                throw invalid_parameter("SampleSet: sample " + std::to_string(i) +
                                        " has dimension " + std::to_string(points_[i].size()) +
                                        ", expected " + std::to_string(dim_));
            for (double c : points_[i])
                if (!std::isfinite(c))
                    throw invalid_parameter("SampleSet: non-finite coordinate in sample " +
                                            std::to_string(i));
        }
    }

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<Vec>& points() const { return points_; }
    const Vec& operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<Vec> points_;
    std::size_t dim_;
};

// k disjoint index blocks covering {0..N-1}, with their means cached.
class BlockPartition {
public:
    BlockPartition(std::vector<std::vector<std::size_t>> blocks, std::vector<Vec> means)
        : blocks_(std::move(blocks)), means_(std::move(means)) {
        if (blocks_.empty() || blocks_.size() != means_.size())
            throw invalid_parameter("BlockPartition: blocks and means must be nonempty and aligned");
    }

    std::size_t k() const { return blocks_.size(); }
    std::size_t dim() const { return means_[0].size(); }
    const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
    const std::vector<Vec>& block_means() const { return means_; }

private:
    std::vector<std::vector<std::size_t>> blocks_;
    std::vector<Vec> means_;
};

namespace detail {

// Plain left-to-right accumulation; the documented tolerance budget for
// block means is 1e-12 relative.
inline Vec mean_over(const SampleSet& samples, const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw corrupt_partition("block_means: empty block");
    Vec acc(samples.dim(), 0.0);
    for (std::size_t i : idx) {
        if (i >= samples.size())
            throw corrupt_partition("block_means: index " + std::to_string(i) +
                                    " out of range for N=" + std::to_string(samples.size()));
        const Vec& x = samples[i];
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += x[c];
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (double& c : acc) c *= inv;
    return acc;
}

}  // namespace detail

// Recompute the per-block means from scratch, validating the partition
// indices against `samples`.
inline std::vector<Vec> block_means(const BlockPartition& partition, const SampleSet& samples) {
    std::vector<Vec> out;
    out.reserve(partition.k());
    for (const auto& block : partition.blocks()) out.push_back(detail::mean_over(samples, block));
    return out;
}

// Contiguous k-way partition: the first (N mod k) blocks take ceil(N/k)
// consecutive samples, the remaining blocks floor(N/k).
inline BlockPartition make_partition(const SampleSet& samples, std::size_t k) {
    const std::size_t n = samples.size();
    if (k < 1 || k > n)
        throw invalid_parameter("make_partition: k=" + std::to_string(k) +
                                " outside [1, N=" + std::to_string(n) + "]");
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::vector<std::vector<std::size_t>> blocks(k);
    std::size_t next = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t size = base + (j < extra ? 1 : 0);
        blocks[j].reserve(size);
        for (std::size_t i = 0; i < size; ++i) blocks[j].push_back(next++);
    }
    std::vector<Vec> means;
    means.reserve(k);
    for (const auto& block : blocks) means.push_back(detail::mean_over(samples, block));
    return BlockPartition(std::move(blocks), std::move(means));
}

}  // namespace robustmean
