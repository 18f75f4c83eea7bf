#include "bqfl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bqfl/idx.hpp"
#include "bqfl/rng.hpp"

namespace bqfl {

void TrainerConfig::validate() const {
    if (layers.size() < 2) {
        throw std::invalid_argument("trainer.layers needs at least input and output sizes");
    }
    for (const auto s : layers) {
        if (s == 0) {
            throw std::invalid_argument("trainer.layers entries must be positive");
        }
    }
    if (classes() < 2) {
        throw std::invalid_argument("trainer needs at least two classes");
    }
    if (batch_size == 0 || epochs == 0 || samples_per_client == 0) {
        throw std::invalid_argument("trainer batch_size, epochs and samples_per_client must be positive");
    }
    if (learning_rate < 0.0 || weight_decay < 0.0 || !(grad_clip_norm > 0.0)) {
        throw std::invalid_argument("trainer learning_rate/weight_decay must be >= 0 and grad_clip_norm > 0");
    }
    if (dataset == DatasetKind::idx_files && (idx_images.empty() || idx_labels.empty())) {
        throw std::invalid_argument("trainer.idx_images and trainer.idx_labels are required for idx datasets");
    }
}

std::size_t parameter_count(const std::vector<std::size_t>& layers) {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        total += layers[l + 1] * layers[l] + layers[l + 1];
    }
    return total;
}

std::vector<double> init_parameters(const std::vector<std::size_t>& layers, std::uint64_t seed) {
    std::vector<double> params(parameter_count(layers), 0.0);
    RandomStream rng(seed);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const std::size_t in = layers[l], out = layers[l + 1];
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (std::size_t k = 0; k < in * out; ++k) {
            params[offset + k] = scale * rng.normal();
        }
        offset += in * out + out;
    }
    return params;
}

namespace {

class Mlp {
public:
    explicit Mlp(const std::vector<std::size_t>& layers) : layers_(layers) {
        std::size_t offset = 0;
        for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
            w_offset_.push_back(offset);
            offset += layers_[l + 1] * layers_[l];
            b_offset_.push_back(offset);
            offset += layers_[l + 1];
        }
        acts_.resize(layers_.size());
        deltas_.resize(layers_.size());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            acts_[l].resize(layers_[l]);
            deltas_[l].resize(layers_[l]);
        }
    }

    // Forward pass; returns the cross-entropy loss and, when grad is given,
    // accumulates d loss / d params into it.
    double sample(const std::vector<double>& p, const double* x, std::uint32_t label, std::vector<double>* grad) {
        const std::size_t depth = layers_.size() - 1;
        std::copy(x, x + layers_[0], acts_[0].begin());
        for (std::size_t l = 0; l < depth; ++l) {
            const std::size_t in = layers_[l], out = layers_[l + 1];
            const double* w = p.data() + w_offset_[l];
            const double* b = p.data() + b_offset_[l];
            auto& next = acts_[l + 1];
            for (std::size_t o = 0; o < out; ++o) {
                double z = b[o];
                const double* row = w + o * in;
                for (std::size_t i = 0; i < in; ++i) {
                    z += row[i] * acts_[l][i];
                }
                next[o] = (l + 1 < depth) ? std::max(0.0, z) : z;
            }
        }

        auto& logits = acts_[depth];
        const double top = *std::max_element(logits.begin(), logits.end());
        double norm = 0.0;
        for (const double z : logits) {
            norm += std::exp(z - top);
        }
        const double log_norm = top + std::log(norm);
        const double loss = log_norm - logits[label];
        if (!grad) {
            return loss;
        }

        auto& delta = deltas_[depth];
        for (std::size_t o = 0; o < logits.size(); ++o) {
            delta[o] = std::exp(logits[o] - log_norm) - (o == label ? 1.0 : 0.0);
        }
        for (std::size_t l = depth; l-- > 0;) {
            const std::size_t in = layers_[l], out = layers_[l + 1];
            const double* w = p.data() + w_offset_[l];
            double* gw = grad->data() + w_offset_[l];
            double* gb = grad->data() + b_offset_[l];
            const auto& d_out = deltas_[l + 1];
            const auto& a_in = acts_[l];
            for (std::size_t o = 0; o < out; ++o) {
                gb[o] += d_out[o];
                double* grow = gw + o * in;
                for (std::size_t i = 0; i < in; ++i) {
                    grow[i] += d_out[o] * a_in[i];
                }
            }
            if (l == 0) {
                break;
            }
            auto& d_in = deltas_[l];
            std::fill(d_in.begin(), d_in.end(), 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                const double* row = w + o * in;
                for (std::size_t i = 0; i < in; ++i) {
                    d_in[i] += row[i] * d_out[o];
                }
            }
            for (std::size_t i = 0; i < in; ++i) {
                if (a_in[i] <= 0.0) {
                    d_in[i] = 0.0;
                }
            }
        }
        return loss;
    }

private:
    std::vector<std::size_t> layers_;
    std::vector<std::size_t> w_offset_;
    std::vector<std::size_t> b_offset_;
    std::vector<std::vector<double>> acts_;
    std::vector<std::vector<double>> deltas_;
};

void check_shard(const TrainerConfig& config, const DataShard& shard) {
    if (shard.size() == 0) {
        throw std::invalid_argument("empty training shard");
    }
    if (shard.dim != config.input_dim() || shard.features.size() != shard.size() * shard.dim) {
        throw std::invalid_argument("shard feature dimension does not match the model input");
    }
}

}  // namespace

double shard_loss(const std::vector<double>& params, const TrainerConfig& config, const DataShard& shard) {
    check_shard(config, shard);
    Mlp net(config.layers);
    double total = 0.0;
    for (std::size_t s = 0; s < shard.size(); ++s) {
        total += net.sample(params, shard.features.data() + s * shard.dim, shard.labels[s], nullptr);
    }
    return total / static_cast<double>(shard.size());
}

GradientVector local_train_step(const GlobalModel& model, const TrainerConfig& config, const DataShard& shard,
                                bool flip_labels, TrainStats* stats) {
    config.validate();
    check_shard(config, shard);
    const std::size_t p = parameter_count(config.layers);
    if (model.weights.size() != p) {
        throw std::invalid_argument("global model dimension does not match the trainer architecture");
    }
    const auto classes = static_cast<std::uint32_t>(config.classes());

    std::vector<double> w = model.weights;
    std::vector<double> grad(p);
    Mlp net(config.layers);
    TrainStats local;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t start = 0; start < shard.size(); start += config.batch_size) {
            const std::size_t end = std::min(shard.size(), start + config.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t s = start; s < end; ++s) {
                std::uint32_t y = shard.labels[s];
                if (flip_labels) {
                    y = (y + 1) % classes;
                }
                net.sample(w, shard.features.data() + s * shard.dim, y, &grad);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            double norm_sq = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                grad[k] = grad[k] * inv + config.weight_decay * w[k];
                norm_sq += grad[k] * grad[k];
            }
            double norm = std::sqrt(norm_sq);
            if (norm > config.grad_clip_norm) {
                const double scale = config.grad_clip_norm / norm;
                for (auto& g : grad) {
                    g *= scale;
                }
                norm = config.grad_clip_norm;
            }
            for (std::size_t k = 0; k < p; ++k) {
                w[k] -= config.learning_rate * grad[k];
            }
            local.max_step_norm = std::max(local.max_step_norm, norm);
            ++local.steps;
        }
    }
    if (stats) {
        *stats = local;
    }
    for (std::size_t k = 0; k < p; ++k) {
        w[k] -= model.weights[k];
    }
    return GradientVector(std::move(w));
}

namespace {

std::vector<DataShard> blob_shards(const TrainerConfig& config, std::size_t clients, std::uint64_t seed) {
    const std::size_t dim = config.input_dim();
    const std::size_t classes = config.classes();
    std::vector<double> means(classes * dim);
    RandomStream mean_rng(derive_seed(seed, {0xb1}));
    for (auto& v : means) {
        v = mean_rng.normal();
    }
    std::vector<DataShard> shards(clients);
    for (std::size_t c = 0; c < clients; ++c) {
        RandomStream rng(derive_seed(seed, {0xb2, c}));
        auto& shard = shards[c];
        shard.dim = dim;
        shard.features.resize(config.samples_per_client * dim);
        shard.labels.resize(config.samples_per_client);
        for (std::size_t s = 0; s < config.samples_per_client; ++s) {
            std::size_t label = 0;
            if (rng.bernoulli(0.8)) {
                label = (c + rng.index(2)) % classes;
            } else {
                label = rng.index(classes);
            }
            shard.labels[s] = static_cast<std::uint32_t>(label);
            for (std::size_t j = 0; j < dim; ++j) {
                shard.features[s * dim + j] = means[label * dim + j] + config.blob_spread * rng.normal();
            }
        }
    }
    return shards;
}

std::vector<DataShard> idx_shards(const TrainerConfig& config, std::size_t clients, std::uint64_t seed) {
    const auto images = read_idx_images(config.idx_images);
    const auto labels = read_idx_labels(config.idx_labels);
    if (labels.size() != images.count) {
        throw std::runtime_error("IDX image and label counts differ");
    }
    const std::size_t dim = images.rows * images.cols;
    if (dim != config.input_dim()) {
        throw std::invalid_argument("IDX image size does not match trainer input dimension");
    }
    std::vector<std::size_t> order(images.count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

    const std::size_t pieces = 2 * clients;
    const std::size_t piece = images.count / pieces;
    if (piece == 0) {
        throw std::invalid_argument("IDX dataset too small for the client count");
    }
    std::vector<std::size_t> piece_order(pieces);
    std::iota(piece_order.begin(), piece_order.end(), 0);
    RandomStream rng(derive_seed(seed, {0xb3}));
    rng.shuffle(piece_order);

    const std::size_t per_piece = std::min(piece, std::max<std::size_t>(1, config.samples_per_client / 2));
    std::vector<DataShard> shards(clients);
    for (std::size_t c = 0; c < clients; ++c) {
        auto& shard = shards[c];
        shard.dim = dim;
        for (std::size_t h = 0; h < 2; ++h) {
            const std::size_t base = piece_order[2 * c + h] * piece;
            for (std::size_t s = 0; s < per_piece; ++s) {
                // Stride through the piece so a capped sample still spans it.
                const std::size_t src = order[base + (s * piece) / per_piece];
                shard.labels.push_back(labels[src] % config.classes());
                for (std::size_t j = 0; j < dim; ++j) {
                    shard.features.push_back(images.pixels[src * dim + j] / 255.0);
                }
            }
        }
    }
    return shards;
}

}  // namespace

std::vector<DataShard> make_client_shards(const TrainerConfig& config, std::size_t clients, std::uint64_t seed) {
    config.validate();
    return config.dataset == DatasetKind::synthetic_blobs ? blob_shards(config, clients, seed)
                                                          : idx_shards(config, clients, seed);
}

}  // namespace bqfl
