#include "argmine/tagger.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "argmine/error.hpp"
#include "argmine/eval.hpp"
#include "argmine/rng.hpp"
#include "json.hpp"

namespace argmine {

// ---------------------------------------------------------------------------
// Vocabulary

Vocab::Vocab() : Vocab(std::vector<std::string>{"<pad>", "<unk>"}) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2) throw Error(ErrorKind::kVocabMissing, "vocabulary lacks special entries");
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<int>(i));
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknown : it->second;
}

Vocab build_vocab(const Corpus& train_cases, std::size_t min_freq) {
  if (train_cases.empty()) throw Error(ErrorKind::kEmptyTrainingSet, "build_vocab: no training cases");
  std::map<std::string, std::size_t> freq;
  for (const auto& c : train_cases) {
    for (const auto& p : c.paragraphs) {
      for (std::size_t i = 0; i < p.tokens.size(); ++i) ++freq[std::string(p.token_text(i))];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : freq) {
    if (n >= std::max<std::size_t>(min_freq, 1)) kept.emplace_back(tok, n);
  }
  // std::map iteration is lexicographic, so a stable sort on count keeps it as tie-break.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = {"<pad>", "<unk>"};
  for (auto& [tok, n] : kept) {
    if (tok != tokens[0] && tok != tokens[1]) tokens.push_back(tok);
  }
  return Vocab(std::move(tokens));
}

void TaggerConfig::validate() const {
  if (embedding_dim == 0 || hidden_dim == 0 || batch_size == 0) {
    throw Error(ErrorKind::kConfigInvalid, "tagger dimensions and batch size must be positive");
  }
  if (epochs < 0) throw Error(ErrorKind::kConfigInvalid, "epochs must be non-negative");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::kConfigInvalid, "learning rate must be positive");
  if (weight_decay < 0.0) throw Error(ErrorKind::kConfigInvalid, "weight decay must be non-negative");
}

// ---------------------------------------------------------------------------
// Model

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using Vec = Eigen::VectorXd;

// Block indices in layout order.
enum GateBlock { kWz, kWr, kWn, kUz, kUr, kUn, kBz, kBr, kBn, kGateBlocks };
constexpr std::size_t kEmbedding = 0;
constexpr std::size_t gru_block(int dir, int k) { return 1 + std::size_t(dir) * kGateBlocks + std::size_t(k); }
constexpr std::size_t head_weight(Dimension d) { return 1 + 2 * kGateBlocks + (d == Dimension::ArgType ? 0 : 2); }
constexpr std::size_t head_bias(Dimension d) { return head_weight(d) + 1; }

std::size_t tag_count(Dimension d) { return d == Dimension::ArgType ? 2 * kNumArgTypes + 1 : 2 * kNumActors + 1; }

Vec sigmoid(const Vec& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

struct GruStep {
  Vec h_prev, z, r, n, u;
};

// Read-only and gradient views onto the flat parameter storage.
template <typename Storage>
struct Views {
  Storage* data;
  const std::vector<TaggerModel::Block>* blocks;

  auto mat(std::size_t b) const {
    const auto& blk = (*blocks)[b];
    if constexpr (std::is_const_v<Storage>) {
      return ConstMatMap(data + blk.offset, Eigen::Index(blk.rows), Eigen::Index(blk.cols));
    } else {
      return MatMap(data + blk.offset, Eigen::Index(blk.rows), Eigen::Index(blk.cols));
    }
  }
  auto vec(std::size_t b) const {
    const auto& blk = (*blocks)[b];
    if constexpr (std::is_const_v<Storage>) {
      return Eigen::Map<const Vec>(data + blk.offset, Eigen::Index(blk.rows));
    } else {
      return Eigen::Map<Vec>(data + blk.offset, Eigen::Index(blk.rows));
    }
  }
};

using ParamViews = Views<const double>;
using GradViews = Views<double>;

struct Encoded {
  std::vector<Vec> x;                  // embeddings by position
  std::array<std::vector<GruStep>, 2> steps;  // by step order
  std::vector<Vec> states;             // [forward; backward] by position
};

std::size_t position(std::size_t step, std::size_t len, int dir) { return dir == 0 ? step : len - 1 - step; }

Encoded run_encoder(const ParamViews& P, const std::vector<int>& ids, std::size_t hidden) {
  const std::size_t len = ids.size();
  Encoded enc;
  const auto emb = P.mat(kEmbedding);
  enc.x.reserve(len);
  for (int id : ids) enc.x.push_back(emb.row(id).transpose());
  enc.states.assign(len, Vec::Zero(Eigen::Index(2 * hidden)));
  for (int dir = 0; dir < 2; ++dir) {
    const auto Wz = P.mat(gru_block(dir, kWz));
    const auto Wr = P.mat(gru_block(dir, kWr));
    const auto Wn = P.mat(gru_block(dir, kWn));
    const auto Uz = P.mat(gru_block(dir, kUz));
    const auto Ur = P.mat(gru_block(dir, kUr));
    const auto Un = P.mat(gru_block(dir, kUn));
    const auto bz = P.vec(gru_block(dir, kBz));
    const auto br = P.vec(gru_block(dir, kBr));
    const auto bn = P.vec(gru_block(dir, kBn));
    Vec h = Vec::Zero(Eigen::Index(hidden));
    auto& steps = enc.steps[dir];
    steps.reserve(len);
    for (std::size_t s = 0; s < len; ++s) {
      const Vec& x = enc.x[position(s, len, dir)];
      GruStep st;
      st.h_prev = h;
      st.z = sigmoid(Wz * x + Uz * h + bz);
      st.r = sigmoid(Wr * x + Ur * h + br);
      st.u = Un * h;
      st.n = (Wn * x + st.r.cwiseProduct(st.u) + bn).array().tanh().matrix();
      h = (1.0 - st.z.array()).matrix().cwiseProduct(st.n) + st.z.cwiseProduct(st.h_prev);
      enc.states[position(s, len, dir)].segment(Eigen::Index(dir * hidden), Eigen::Index(hidden)) = h;
      steps.push_back(std::move(st));
    }
  }
  return enc;
}

void backprop_encoder(const ParamViews& P, const GradViews& G, const std::vector<int>& ids,
                      const Encoded& enc, const std::vector<Vec>& d_states, std::size_t hidden) {
  const std::size_t len = ids.size();
  std::vector<Vec> dx(len, Vec::Zero(enc.x.empty() ? 0 : enc.x.front().size()));
  for (int dir = 0; dir < 2; ++dir) {
    const auto Wz = P.mat(gru_block(dir, kWz));
    const auto Wr = P.mat(gru_block(dir, kWr));
    const auto Wn = P.mat(gru_block(dir, kWn));
    const auto Uz = P.mat(gru_block(dir, kUz));
    const auto Ur = P.mat(gru_block(dir, kUr));
    const auto Un = P.mat(gru_block(dir, kUn));
    auto gWz = G.mat(gru_block(dir, kWz));
    auto gWr = G.mat(gru_block(dir, kWr));
    auto gWn = G.mat(gru_block(dir, kWn));
    auto gUz = G.mat(gru_block(dir, kUz));
    auto gUr = G.mat(gru_block(dir, kUr));
    auto gUn = G.mat(gru_block(dir, kUn));
    auto gbz = G.vec(gru_block(dir, kBz));
    auto gbr = G.vec(gru_block(dir, kBr));
    auto gbn = G.vec(gru_block(dir, kBn));
    Vec carry = Vec::Zero(Eigen::Index(hidden));
    for (std::size_t s = len; s-- > 0;) {
      const std::size_t pos = position(s, len, dir);
      const GruStep& st = enc.steps[dir][s];
      const Vec& x = enc.x[pos];
      const Vec dh = d_states[pos].segment(Eigen::Index(dir * hidden), Eigen::Index(hidden)) + carry;

      const Vec dn = dh.cwiseProduct((1.0 - st.z.array()).matrix());
      const Vec dz = dh.cwiseProduct(st.h_prev - st.n);
      Vec dh_prev = dh.cwiseProduct(st.z);

      const Vec da_n = dn.cwiseProduct((1.0 - st.n.array().square()).matrix());
      gWn.noalias() += da_n * x.transpose();
      gbn += da_n;
      Vec dxi = Wn.transpose() * da_n;
      const Vec dr = da_n.cwiseProduct(st.u);
      const Vec du = da_n.cwiseProduct(st.r);
      gUn.noalias() += du * st.h_prev.transpose();
      dh_prev.noalias() += Un.transpose() * du;

      const Vec da_r = dr.cwiseProduct(st.r.cwiseProduct((1.0 - st.r.array()).matrix()));
      gWr.noalias() += da_r * x.transpose();
      gUr.noalias() += da_r * st.h_prev.transpose();
      gbr += da_r;
      dxi.noalias() += Wr.transpose() * da_r;
      dh_prev.noalias() += Ur.transpose() * da_r;

      const Vec da_z = dz.cwiseProduct(st.z.cwiseProduct((1.0 - st.z.array()).matrix()));
      gWz.noalias() += da_z * x.transpose();
      gUz.noalias() += da_z * st.h_prev.transpose();
      gbz += da_z;
      dxi.noalias() += Wz.transpose() * da_z;
      dh_prev.noalias() += Uz.transpose() * da_z;

      dx[pos] += dxi;
      carry = dh_prev;
    }
  }
  auto gEmb = G.mat(kEmbedding);
  for (std::size_t t = 0; t < len; ++t) gEmb.row(ids[t]) += dx[t].transpose();
}

Vec softmax(const Vec& logits) {
  const Vec shifted = (logits.array() - logits.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

const std::vector<int>& targets_for(const TaggerExample& ex, Dimension task) {
  return task == Dimension::ArgType ? ex.arg_targets : ex.actor_targets;
}

}  // namespace

TaggerModel::TaggerModel(std::size_t vocab_size, std::size_t embedding_dim, std::size_t hidden_dim,
                         std::uint64_t seed)
    : vocab_(vocab_size), embed_(embedding_dim), hidden_(hidden_dim) {
  layout();
  Rng rng(seed);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    if (blk.cols == 1) continue;  // biases start at zero
    const double limit = b == kEmbedding ? 0.1 : std::sqrt(6.0 / double(blk.rows + blk.cols));
    for (std::size_t i = 0; i < blk.rows * blk.cols; ++i) {
      params_[blk.offset + i] = rng.uniform(-limit, limit);
    }
  }
  for (std::size_t k = 0; k < embed_; ++k) params_[blocks_[kEmbedding].offset + k] = 0.0;  // <pad>
}

TaggerModel::TaggerModel(std::size_t vocab_size, std::size_t embedding_dim, std::size_t hidden_dim,
                         std::vector<double> parameters)
    : vocab_(vocab_size), embed_(embedding_dim), hidden_(hidden_dim) {
  layout();
  if (parameters.size() != params_.size()) {
    throw Error(ErrorKind::kParse, "parameter count " + std::to_string(parameters.size()) +
                                       " does not match model shape (" +
                                       std::to_string(params_.size()) + ")");
  }
  params_ = std::move(parameters);
}

void TaggerModel::layout() {
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    blocks_.push_back({std::move(name), offset, rows, cols});
    offset += rows * cols;
  };
  add("embedding", vocab_, embed_);
  for (int dir = 0; dir < 2; ++dir) {
    const std::string p = dir == 0 ? "gru_fwd." : "gru_bwd.";
    add(p + "W_z", hidden_, embed_);
    add(p + "W_r", hidden_, embed_);
    add(p + "W_n", hidden_, embed_);
    add(p + "U_z", hidden_, hidden_);
    add(p + "U_r", hidden_, hidden_);
    add(p + "U_n", hidden_, hidden_);
    add(p + "b_z", hidden_, 1);
    add(p + "b_r", hidden_, 1);
    add(p + "b_n", hidden_, 1);
  }
  add("arg_head.W", tag_count(Dimension::ArgType), 2 * hidden_);
  add("arg_head.b", tag_count(Dimension::ArgType), 1);
  add("actor_head.W", tag_count(Dimension::Actor), 2 * hidden_);
  add("actor_head.b", tag_count(Dimension::Actor), 1);
  params_.assign(offset, 0.0);
}

std::vector<std::vector<double>> TaggerModel::encode(const std::vector<int>& ids) const {
  const ParamViews P{params_.data(), &blocks_};
  const Encoded enc = run_encoder(P, ids, hidden_);
  std::vector<std::vector<double>> out;
  for (const auto& s : enc.states) out.emplace_back(s.data(), s.data() + s.size());
  return out;
}

std::vector<std::vector<double>> TaggerModel::head_logits(
    const std::vector<std::vector<double>>& states, Dimension task) const {
  const ParamViews P{params_.data(), &blocks_};
  const auto W = P.mat(head_weight(task));
  const auto b = P.vec(head_bias(task));
  std::vector<std::vector<double>> out;
  for (const auto& s : states) {
    const Vec logits = W * Eigen::Map<const Vec>(s.data(), Eigen::Index(s.size())) + b;
    out.emplace_back(logits.data(), logits.data() + logits.size());
  }
  return out;
}

double TaggerModel::loss(const std::vector<const TaggerExample*>& batch, Dimension task) const {
  std::vector<double> unused;
  return loss_and_gradient(batch, task, unused);
}

double TaggerModel::loss_and_gradient(const std::vector<const TaggerExample*>& batch, Dimension task,
                                      std::vector<double>& grad) const {
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != params_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "gradient buffer has wrong size");
  }
  std::size_t active = 0;
  for (const auto* ex : batch) {
    for (auto m : ex->mask) active += m != 0;
  }
  if (active == 0) return 0.0;
  const double scale = 1.0 / double(active);

  const ParamViews P{params_.data(), &blocks_};
  const GradViews G{grad.data(), &blocks_};
  const auto W = P.mat(head_weight(task));
  const auto b = P.vec(head_bias(task));
  double total = 0.0;
  for (const auto* ex : batch) {
    if (ex->ids.empty()) continue;
    const auto& targets = targets_for(*ex, task);
    const Encoded enc = run_encoder(P, ex->ids, hidden_);
    std::vector<Vec> d_states(ex->ids.size(), Vec::Zero(Eigen::Index(2 * hidden_)));
    for (std::size_t t = 0; t < ex->ids.size(); ++t) {
      if (ex->mask[t] == 0) continue;
      const Vec probs = softmax(W * enc.states[t] + b);
      total -= std::log(std::max(probs[targets[t]], 1e-300));
      if (want_grad) {
        Vec d_logits = probs;
        d_logits[targets[t]] -= 1.0;
        d_logits *= scale;
        G.mat(head_weight(task)).noalias() += d_logits * enc.states[t].transpose();
        G.vec(head_bias(task)) += d_logits;
        d_states[t].noalias() = W.transpose() * d_logits;
      }
    }
    if (want_grad) backprop_encoder(P, G, ex->ids, enc, d_states, hidden_);
  }
  return total * scale;
}

std::vector<int> TaggerModel::predict_indices(const std::vector<int>& ids, Dimension task) const {
  std::vector<int> out;
  for (const auto& logits : head_logits(encode(ids), task)) {
    out.push_back(static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

int tag_index(const std::vector<std::string>& vocab, const std::string& tag) {
  auto it = std::find(vocab.begin(), vocab.end(), tag);
  if (it == vocab.end()) throw Error(ErrorKind::kInvalidSequence, "tag '" + tag + "' not in tagset");
  return static_cast<int>(it - vocab.begin());
}

std::vector<ArgumentSpan> spans_of(const AnnotatedCase& c, const std::string& paragraph_id) {
  std::vector<ArgumentSpan> out;
  for (const auto& s : c.gold_spans) {
    if (s.paragraph_id == paragraph_id) out.push_back(s);
  }
  return out;
}

std::vector<int> token_ids(const Paragraph& p, const Vocab& vocab) {
  std::vector<int> ids;
  ids.reserve(p.tokens.size());
  for (std::size_t i = 0; i < p.tokens.size(); ++i) ids.push_back(vocab.id(p.token_text(i)));
  return ids;
}

class AdamW {
 public:
  AdamW(std::size_t n, const TaggerConfig& config, std::size_t total_steps,
        const std::vector<TaggerModel::Block>& blocks)
      : m_(n, 0.0), v_(n, 0.0), decay_(n, 1), config_(config), total_(total_steps) {
    for (const auto& blk : blocks) {
      if (blk.cols == 1) std::fill_n(decay_.begin() + long(blk.offset), blk.rows, 0);
    }
  }

  // Linear warmup to the base rate, then linear decay towards zero.
  double rate(std::size_t step) const {
    const double base = config_.learning_rate;
    if (step < config_.warmup_steps) return base * double(step + 1) / double(config_.warmup_steps);
    if (total_ <= config_.warmup_steps) return base;
    const double left = double(total_ - step) / double(total_ - config_.warmup_steps);
    return base * std::max(left, 0.0);
  }

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    const double lr = rate(t_);
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, double(t_));
    const double c2 = 1.0 - std::pow(kBeta2, double(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      if (decay_[i]) params[i] -= lr * config_.weight_decay * params[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  std::vector<std::uint8_t> decay_;
  TaggerConfig config_;
  std::size_t total_;
  std::size_t t_ = 0;
};

DevSnapshot score(const TaggerModel& model, const Vocab& vocab, const Corpus& cases) {
  const auto arg_tags = tag_vocabulary(Dimension::ArgType);
  const auto actor_tags = tag_vocabulary(Dimension::Actor);
  TagSequences gold_arg, pred_arg, gold_actor, pred_actor;
  for (const auto& c : cases) {
    for (const auto& p : c.paragraphs) {
      if (p.tokens.empty()) continue;
      const auto spans = spans_of(c, p.id);
      const auto ids = token_ids(p, vocab);
      const auto states = model.encode(ids);
      for (Dimension d : {Dimension::ArgType, Dimension::Actor}) {
        const auto& tags = d == Dimension::ArgType ? arg_tags : actor_tags;
        std::vector<std::string> pred;
        for (const auto& logits : model.head_logits(states, d)) {
          pred.push_back(tags[std::max_element(logits.begin(), logits.end()) - logits.begin()]);
        }
        (d == Dimension::ArgType ? gold_arg : gold_actor).push_back(encode_bio(p, spans, d).labels);
        (d == Dimension::ArgType ? pred_arg : pred_actor).push_back(repair_bio(pred));
      }
    }
  }
  DevSnapshot snap;
  snap.arg_macro_f1 = token_prf(gold_arg, pred_arg).macro_f1;
  snap.actor_macro_f1 = token_prf(gold_actor, pred_actor).macro_f1;
  snap.combined = 0.5 * (snap.arg_macro_f1 + snap.actor_macro_f1);
  return snap;
}

}  // namespace

std::vector<TaggerExample> make_examples(const Corpus& cases, const Vocab& vocab) {
  const auto arg_tags = tag_vocabulary(Dimension::ArgType);
  const auto actor_tags = tag_vocabulary(Dimension::Actor);
  std::vector<TaggerExample> out;
  for (const auto& c : cases) {
    for (const auto& p : c.paragraphs) {
      if (p.tokens.empty()) continue;
      const auto spans = spans_of(c, p.id);
      TaggerExample ex;
      ex.ids = token_ids(p, vocab);
      for (const auto& tag : encode_bio(p, spans, Dimension::ArgType).labels) {
        ex.arg_targets.push_back(tag_index(arg_tags, tag));
      }
      for (const auto& tag : encode_bio(p, spans, Dimension::Actor).labels) {
        ex.actor_targets.push_back(tag_index(actor_tags, tag));
      }
      ex.mask.assign(ex.ids.size(), 1);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

TrainResult train(const CorpusSplit& split, const Corpus& corpus, const TaggerConfig& config) {
  config.validate();
  if (split.train.empty()) throw Error(ErrorKind::kEmptySplit, "training split is empty");
  if (split.dev.empty()) throw Error(ErrorKind::kEmptySplit, "dev split is empty");
  const Corpus train_cases = select_cases(corpus, split.train);
  const Corpus dev_cases = select_cases(corpus, split.dev);

  const Vocab vocab = build_vocab(train_cases, config.min_freq);
  const auto examples = make_examples(train_cases, vocab);
  if (examples.empty()) throw Error(ErrorKind::kEmptyTrainingSet, "training split has no tokens");

  TaggerModel model(vocab.size(), config.embedding_dim, config.hidden_dim, config.seed);

  // Length buckets: sort by length, then cut into fixed-size batches.
  std::vector<std::size_t> by_length(examples.size());
  std::iota(by_length.begin(), by_length.end(), 0);
  std::stable_sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) {
    return examples[a].ids.size() < examples[b].ids.size();
  });
  std::vector<std::vector<const TaggerExample*>> batches;
  for (std::size_t i = 0; i < by_length.size(); i += config.batch_size) {
    auto& batch = batches.emplace_back();
    for (std::size_t j = i; j < std::min(i + config.batch_size, by_length.size()); ++j) {
      batch.push_back(&examples[by_length[j]]);
    }
  }

  const std::size_t total_steps = 2 * batches.size() * std::size_t(config.epochs);
  AdamW optimizer(model.parameters().size(), config, total_steps, model.blocks());
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  TrainResult result;
  auto snapshot = [&](int epoch, const DevSnapshot& dev) {
    result.checkpoint = {config, vocab, model.parameters(), epoch, dev};
  };
  if (config.epochs == 0) {
    const DevSnapshot dev = score(model, vocab, dev_cases);
    result.log.push_back({0, 0.0, 0.0, dev});
    snapshot(0, dev);
    return result;
  }

  std::vector<double> grad(model.parameters().size());
  std::vector<std::size_t> order(batches.size());
  std::iota(order.begin(), order.end(), 0);
  double best = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double arg_loss = 0.0;
    double actor_loss = 0.0;
    for (std::size_t b : order) {
      // Each batch is visited once per task, alternating arg / actor.
      for (Dimension task : {Dimension::ArgType, Dimension::Actor}) {
        std::fill(grad.begin(), grad.end(), 0.0);
        const double l = model.loss_and_gradient(batches[b], task, grad);
        (task == Dimension::ArgType ? arg_loss : actor_loss) += l;
        optimizer.step(model.parameters(), grad);
      }
    }
    EpochLog entry{epoch, arg_loss / double(batches.size()), actor_loss / double(batches.size()),
                   score(model, vocab, dev_cases)};
    result.log.push_back(entry);
    if (entry.dev.combined > best) {
      best = entry.dev.combined;
      snapshot(epoch, entry.dev);
    }
  }
  return result;
}

std::vector<ParagraphPrediction> predict(const Checkpoint& ckpt, const AnnotatedCase& c) {
  if (ckpt.vocab.size() < 2) throw Error(ErrorKind::kVocabMissing, "checkpoint has no vocabulary");
  const TaggerModel model(ckpt.vocab.size(), ckpt.config.embedding_dim, ckpt.config.hidden_dim,
                          ckpt.parameters);
  const auto arg_tags = tag_vocabulary(Dimension::ArgType);
  const auto actor_tags = tag_vocabulary(Dimension::Actor);
  std::vector<ParagraphPrediction> out;
  for (const auto& p : c.paragraphs) {
    ParagraphPrediction pred{p.id, {Dimension::ArgType, {}}, {Dimension::Actor, {}}};
    if (!p.tokens.empty()) {
      const auto states = model.encode(token_ids(p, ckpt.vocab));
      for (Dimension d : {Dimension::ArgType, Dimension::Actor}) {
        const auto& tags = d == Dimension::ArgType ? arg_tags : actor_tags;
        auto& seq = d == Dimension::ArgType ? pred.arg_type : pred.actor;
        for (const auto& logits : model.head_logits(states, d)) {
          seq.labels.push_back(tags[std::max_element(logits.begin(), logits.end()) - logits.begin()]);
        }
        seq = repair_bio(seq);
      }
    }
    out.push_back(std::move(pred));
  }
  return out;
}

DevSnapshot evaluate(const Checkpoint& ckpt, const Corpus& cases) {
  const TaggerModel model(ckpt.vocab.size(), ckpt.config.embedding_dim, ckpt.config.hidden_dim,
                          ckpt.parameters);
  return score(model, ckpt.vocab, cases);
}

// ---------------------------------------------------------------------------

std::string checkpoint_to_json(const Checkpoint& ckpt, const std::string& meta_json) {
  using nlohmann::json;
  const auto& c = ckpt.config;
  json j = {{"format", "argmine-tagger"},
            {"version", 1},
            {"config",
             {{"embedding_dim", c.embedding_dim},
              {"hidden_dim", c.hidden_dim},
              {"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"weight_decay", c.weight_decay},
              {"warmup_steps", c.warmup_steps},
              {"seed", c.seed},
              {"min_freq", c.min_freq}}},
            {"epoch", ckpt.epoch},
            {"dev",
             {{"arg_macro_f1", ckpt.dev.arg_macro_f1},
              {"actor_macro_f1", ckpt.dev.actor_macro_f1},
              {"combined", ckpt.dev.combined}}},
            {"vocab", ckpt.vocab.tokens()},
            {"parameters", ckpt.parameters}};
  if (!meta_json.empty()) j["meta"] = json::parse(meta_json);
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "argmine-tagger") {
      throw Error(ErrorKind::kParse, "not a tagger checkpoint");
    }
    if (j.value("version", 0) != 1) throw Error(ErrorKind::kParse, "unsupported checkpoint version");
    Checkpoint ckpt;
    const auto& c = j.at("config");
    ckpt.config.embedding_dim = c.at("embedding_dim").get<std::size_t>();
    ckpt.config.hidden_dim = c.at("hidden_dim").get<std::size_t>();
    ckpt.config.epochs = c.at("epochs").get<int>();
    ckpt.config.learning_rate = c.at("learning_rate").get<double>();
    ckpt.config.batch_size = c.at("batch_size").get<std::size_t>();
    ckpt.config.weight_decay = c.at("weight_decay").get<double>();
    ckpt.config.warmup_steps = c.at("warmup_steps").get<std::size_t>();
    ckpt.config.seed = c.at("seed").get<std::uint64_t>();
    ckpt.config.min_freq = c.at("min_freq").get<std::size_t>();
    ckpt.epoch = j.at("epoch").get<int>();
    ckpt.dev.arg_macro_f1 = j.at("dev").at("arg_macro_f1").get<double>();
    ckpt.dev.actor_macro_f1 = j.at("dev").at("actor_macro_f1").get<double>();
    ckpt.dev.combined = j.at("dev").at("combined").get<double>();
    if (!j.contains("vocab")) throw Error(ErrorKind::kVocabMissing, "checkpoint has no vocabulary");
    ckpt.vocab = Vocab(j.at("vocab").get<std::vector<std::string>>());
    ckpt.parameters = j.at("parameters").get<std::vector<double>>();
    // Shape check.
    TaggerModel probe(ckpt.vocab.size(), ckpt.config.embedding_dim, ckpt.config.hidden_dim,
                      ckpt.parameters);
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("checkpoint: ") + e.what());
  }
}

}  // namespace argmine
