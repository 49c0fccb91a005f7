#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "argmine/bio.hpp"
#include "argmine/corpus.hpp"

namespace argmine {

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnknown = 1;

  Vocab();
  explicit Vocab(std::vector<std::string> tokens);  // tokens[0..1] are the specials

  int id(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Tokens seen at least `min_freq` times, by decreasing frequency then
/// lexicographically, after the padding and unknown entries.
Vocab build_vocab(const Corpus& train_cases, std::size_t min_freq);

struct TaggerConfig {
  std::size_t embedding_dim = 64;
  std::size_t hidden_dim = 128;  // per direction
  int epochs = 10;
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  double weight_decay = 0.01;
  std::size_t warmup_steps = 10;
  std::uint64_t seed = 0;
  std::size_t min_freq = 1;

  void validate() const;
};

/// One paragraph prepared for training: token ids and per-task targets
/// (indices into tag_vocabulary). Positions with mask 0 carry no loss.
struct TaggerExample {
  std::vector<int> ids;
  std::vector<int> arg_targets;
  std::vector<int> actor_targets;
  std::vector<std::uint8_t> mask;
};

/// Shared embedding + bidirectional GRU encoder feeding one linear softmax
/// head per dimension. Parameters live in one flat vector.
class TaggerModel {
 public:
  struct Block {
    std::string name;
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
  };

  TaggerModel(std::size_t vocab_size, std::size_t embedding_dim, std::size_t hidden_dim,
              std::uint64_t seed);
  TaggerModel(std::size_t vocab_size, std::size_t embedding_dim, std::size_t hidden_dim,
              std::vector<double> parameters);

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t hidden_dim() const { return hidden_; }
  std::size_t embedding_dim() const { return embed_; }
  std::size_t vocab_size() const { return vocab_; }

  /// Encoder states, one row of 2 * hidden_dim per token.
  std::vector<std::vector<double>> encode(const std::vector<int>& ids) const;

  /// Head logits for already-encoded states.
  std::vector<std::vector<double>> head_logits(const std::vector<std::vector<double>>& states,
                                               Dimension task) const;

  /// Mean masked cross-entropy of one task over a batch.
  double loss(const std::vector<const TaggerExample*>& batch, Dimension task) const;

  /// Same loss; adds its gradient into `grad` (sized like parameters()).
  double loss_and_gradient(const std::vector<const TaggerExample*>& batch, Dimension task,
                           std::vector<double>& grad) const;

  /// Arg-max tag indices per task.
  std::vector<int> predict_indices(const std::vector<int>& ids, Dimension task) const;

 private:
  void layout();

  std::size_t vocab_;
  std::size_t embed_;
  std::size_t hidden_;
  std::vector<Block> blocks_;
  std::vector<double> params_;
};

struct DevSnapshot {
  double arg_macro_f1 = 0.0;
  double actor_macro_f1 = 0.0;
  double combined = 0.0;  // mean of the two macro-F1s
};

struct Checkpoint {
  TaggerConfig config;
  Vocab vocab;
  std::vector<double> parameters;
  int epoch = 0;
  DevSnapshot dev;
};

struct EpochLog {
  int epoch = 0;
  double arg_loss = 0.0;
  double actor_loss = 0.0;
  DevSnapshot dev;
};

struct TrainResult {
  Checkpoint checkpoint;  // best combined dev score
  std::vector<EpochLog> log;
};

std::vector<TaggerExample> make_examples(const Corpus& cases, const Vocab& vocab);

TrainResult train(const CorpusSplit& split, const Corpus& corpus, const TaggerConfig& config);

struct ParagraphPrediction {
  std::string paragraph_id;
  LabelSequence arg_type;
  LabelSequence actor;
};

/// Repaired BIO predictions for every paragraph of the case.
std::vector<ParagraphPrediction> predict(const Checkpoint& ckpt, const AnnotatedCase& c);

/// Dev-style scoring of a checkpoint on cases (token macro-F1 per task).
DevSnapshot evaluate(const Checkpoint& ckpt, const Corpus& cases);

std::string checkpoint_to_json(const Checkpoint& ckpt, const std::string& meta_json = "");
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace argmine
