#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bqfl/core_model.hpp"

namespace bqfl {

enum class DatasetKind { synthetic_blobs, idx_files };

struct TrainerConfig {
    std::vector<std::size_t> layers{784, 200, 10};  // input, hidden..., classes
    DatasetKind dataset = DatasetKind::synthetic_blobs;
    std::size_t batch_size = 32;
    std::size_t epochs = 1;
    double learning_rate = 0.01;
    double weight_decay = 1e-4;
    double grad_clip_norm = 1.0;
    std::size_t samples_per_client = 64;
    double blob_spread = 1.0;
    std::string idx_images;
    std::string idx_labels;

    std::size_t classes() const { return layers.back(); }
    std::size_t input_dim() const { return layers.front(); }
    void validate() const;
};

/// Row-major features with integer labels in [0, classes).
struct DataShard {
    std::size_t dim = 0;
    std::vector<double> features;
    std::vector<std::uint32_t> labels;

    std::size_t size() const { return labels.size(); }
};

/// Parameter count of the MLP: weights then biases, layer by layer.
std::size_t parameter_count(const std::vector<std::size_t>& layers);

/// He-initialized weights, zero biases.
std::vector<double> init_parameters(const std::vector<std::size_t>& layers, std::uint64_t seed);

/// Mean softmax cross-entropy of the MLP on the shard.
double shard_loss(const std::vector<double>& params, const TrainerConfig& config, const DataShard& shard);

struct TrainStats {
    std::size_t steps = 0;
    double max_step_norm = 0.0;  // norm of the applied (post-clip) step gradient
};

/*
 * Local SGD from the global weights over `epochs` passes in minibatches
 * (shard order, no shuffling). Each step gradient is the batch-mean loss
 * gradient plus weight_decay * w, rescaled to norm grad_clip_norm when larger.
 * Returns W' - W. flip_labels trains on (y + 1) mod C.
 */
GradientVector local_train_step(const GlobalModel& model, const TrainerConfig& config, const DataShard& shard,
                                bool flip_labels, TrainStats* stats = nullptr);

/*
 * Client shards. Synthetic blobs: class means drawn once from `seed`; each
 * client's samples favour two classes (i mod C, i+1 mod C) with probability
 * 0.8. IDX: images sorted by label and dealt to clients in two shards each.
 */
std::vector<DataShard> make_client_shards(const TrainerConfig& config, std::size_t clients, std::uint64_t seed);

}  // namespace bqfl
