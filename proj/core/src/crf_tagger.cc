#include "kgqa/crf_tagger.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/text_io.h"

namespace kgqa {

char tag_char(Tag t) { return t == Tag::Entity ? 'I' : 'O'; }

Tag parse_tag(std::string_view s) {
  if (s == "I") return Tag::Entity;
  if (s == "O") return Tag::NotEntity;
  throw Error("unknown tag '" + std::string(s) + "'");
}

std::string format_tags(const TagSeq& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(tag_char(tags[i]));
  }
  return out;
}

TagSeq parse_tags(std::string_view s) {
  TagSeq out;
  if (s.empty()) return out;
  for (std::string_view t : io::split(s, ' ')) out.push_back(parse_tag(t));
  return out;
}

std::vector<Span> extract_spans(const TagSeq& tags) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] != Tag::Entity) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tags.size() && tags[j] == Tag::Entity) ++j;
    spans.push_back(Span{i, j});
    i = j;
  }
  return spans;
}

// ---------------------------------------------------------------------------
// Features

namespace {

// Byte offsets of code point starts, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) out.push_back(i);
  }
  out.push_back(s.size());
  return out;
}

std::string word_shape(std::string_view w) {
  std::string shape;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto c = static_cast<unsigned char>(w[i]);
    char cls;
    if (c >= 'a' && c <= 'z') {
      cls = 'x';
    } else if (c >= 'A' && c <= 'Z') {
      cls = 'X';
    } else if (c >= '0' && c <= '9') {
      cls = 'd';
    } else if (c >= 0x80) {
      if ((c & 0xC0) == 0x80) continue;
      cls = 'u';
    } else {
      cls = static_cast<char>(c);
    }
    if (shape.empty() || shape.back() != cls) shape.push_back(cls);
  }
  return shape;
}

const std::string kBos = "<s>";
const std::string kEos = "</s>";

}  // namespace

std::vector<std::string> featurize(const std::vector<std::string>& tokens, std::size_t i) {
  const std::size_t n = tokens.size();
  auto at = [&](std::ptrdiff_t k) -> const std::string& {
    if (k < 0) return kBos;
    if (static_cast<std::size_t>(k) >= n) return kEos;
    return tokens[static_cast<std::size_t>(k)];
  };
  const auto pi = static_cast<std::ptrdiff_t>(i);
  const std::string& w = tokens[i];

  std::vector<std::string> f;
  f.reserve(24);
  f.emplace_back("bias");
  f.push_back("token=" + w);
  f.push_back("prev=" + at(pi - 1));
  f.push_back("next=" + at(pi + 1));
  f.push_back("prev2=" + at(pi - 2));
  f.push_back("next2=" + at(pi + 2));
  f.push_back("prev_token=" + at(pi - 1) + "|" + w);
  f.push_back("token_next=" + w + "|" + at(pi + 1));

  std::vector<std::size_t> cps = code_point_offsets(w);
  const std::size_t len = cps.size() - 1;
  for (std::size_t k = 1; k <= 4 && k <= len; ++k) {
    f.push_back("prefix" + std::to_string(k) + "=" + w.substr(0, cps[k]));
    f.push_back("suffix" + std::to_string(k) + "=" + w.substr(cps[len - k]));
  }
  f.push_back("shape=" + word_shape(w));
  if (i == 0) f.emplace_back("pos=first");
  if (i + 1 == n) f.emplace_back("pos=last");
  if (i != 0 && i + 1 != n) f.emplace_back("pos=interior");
  f.push_back("idx=" + std::to_string(std::min<std::size_t>(i, 8)));
  f.push_back("ridx=" + std::to_string(std::min<std::size_t>(n - 1 - i, 8)));
  f.push_back("len=" + std::to_string(std::min<std::size_t>(len, 10)));
  return f;
}

FeatureVocab::FeatureVocab(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  index_.reserve(names_.size());
  for (std::uint32_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::int64_t FeatureVocab::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

CrfModel::CrfModel(FeatureVocab vocab, double l2)
    : vocab_(std::move(vocab)), weights_(vocab_.size() * 2 + 8, 0.0), l2_(l2) {}

SequenceFeatures CrfModel::encode(const std::vector<std::string>& tokens) const {
  SequenceFeatures out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const std::string& f : featurize(tokens, i)) {
      std::int64_t id = vocab_.find(f);
      if (id >= 0) out[i].push_back(static_cast<std::uint32_t>(id));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inference

namespace {

// Weights are `scale * raw`; training keeps a lazily applied L2 shrink in
// `scale`.
struct WeightView {
  const CrfModel& model;
  std::span<const double> raw;
  double scale = 1.0;

  explicit WeightView(const CrfModel& m) : model(m), raw(m.weights()) {}
  WeightView(const CrfModel& m, std::span<const double> r, double s)
      : model(m), raw(r), scale(s) {}

  double at(std::size_t idx) const { return scale * raw[idx]; }
  double trans(int from, int to) const {
    return at(model.transition_index(static_cast<Tag>(from), static_cast<Tag>(to)));
  }
  double start(int t) const { return at(model.start_index(static_cast<Tag>(t))); }
  double stop(int t) const { return at(model.stop_index(static_cast<Tag>(t))); }
};

using Emissions = std::vector<std::array<double, 2>>;

Emissions emissions(const WeightView& w, const SequenceFeatures& feats) {
  Emissions e(feats.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < feats.size(); ++i) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::uint32_t f : feats[i]) {
      s0 += w.raw[std::size_t{f} * 2];
      s1 += w.raw[std::size_t{f} * 2 + 1];
    }
    e[i] = {w.scale * s0, w.scale * s1};
  }
  return e;
}

double lse2(double a, double b) {
  double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

Marginals forward_backward_impl(const WeightView& w, const SequenceFeatures& feats) {
  if (feats.empty()) throw Error("forward_backward: empty sequence");
  const std::size_t n = feats.size();
  Emissions em = emissions(w, feats);
  std::vector<std::array<double, 2>> alpha(n), beta(n);
  for (int t = 0; t < 2; ++t) alpha[0][t] = w.start(t) + em[0][t];
  for (std::size_t i = 1; i < n; ++i) {
    for (int t = 0; t < 2; ++t) {
      alpha[i][t] = em[i][t] + lse2(alpha[i - 1][0] + w.trans(0, t), alpha[i - 1][1] + w.trans(1, t));
    }
  }
  for (int t = 0; t < 2; ++t) beta[n - 1][t] = w.stop(t);
  for (std::size_t i = n - 1; i-- > 0;) {
    for (int t = 0; t < 2; ++t) {
      beta[i][t] = lse2(w.trans(t, 0) + em[i + 1][0] + beta[i + 1][0],
                        w.trans(t, 1) + em[i + 1][1] + beta[i + 1][1]);
    }
  }
  Marginals m;
  m.log_z = lse2(alpha[n - 1][0] + w.stop(0), alpha[n - 1][1] + w.stop(1));
  m.log_z_backward = lse2(w.start(0) + em[0][0] + beta[0][0], w.start(1) + em[0][1] + beta[0][1]);
  m.node.resize(n);
  m.edge.assign(n, {0.0, 0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < 2; ++t) m.node[i][t] = std::exp(alpha[i][t] + beta[i][t] - m.log_z);
    if (i == 0) continue;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        m.edge[i][a * 2 + b] =
            std::exp(alpha[i - 1][a] + w.trans(a, b) + em[i][b] + beta[i][b] - m.log_z);
      }
    }
  }
  return m;
}

double path_score_impl(const WeightView& w, const SequenceFeatures& feats, const TagSeq& tags) {
  Emissions em = emissions(w, feats);
  double s = 0.0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int t = static_cast<int>(tags[i]);
    s += em[i][t];
    if (i == 0) {
      s += w.start(t);
    } else {
      s += w.trans(static_cast<int>(tags[i - 1]), t);
    }
  }
  s += w.stop(static_cast<int>(tags.back()));
  return s;
}

// Adds scale * gradient of log p(tags) to grad. Returns log p(tags).
double accumulate_gradient(const WeightView& w, const SequenceFeatures& feats, const TagSeq& tags,
                           double scale, std::span<double> grad) {
  const CrfModel& model = w.model;
  Marginals m = forward_backward_impl(w, feats);
  const std::size_t n = feats.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int gold = static_cast<int>(tags[i]);
    for (std::uint32_t f : feats[i]) {
      for (int t = 0; t < 2; ++t) {
        grad[std::size_t{f} * 2 + static_cast<std::size_t>(t)] +=
            scale * ((gold == t ? 1.0 : 0.0) - m.node[i][t]);
      }
    }
    if (i > 0) {
      const int prev = static_cast<int>(tags[i - 1]);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          grad[model.transition_index(static_cast<Tag>(a), static_cast<Tag>(b))] +=
              scale * ((prev == a && gold == b ? 1.0 : 0.0) - m.edge[i][a * 2 + b]);
        }
      }
    }
  }
  for (int t = 0; t < 2; ++t) {
    grad[model.start_index(static_cast<Tag>(t))] +=
        scale * ((static_cast<int>(tags.front()) == t ? 1.0 : 0.0) - m.node[0][t]);
    grad[model.stop_index(static_cast<Tag>(t))] +=
        scale * ((static_cast<int>(tags.back()) == t ? 1.0 : 0.0) - m.node[n - 1][t]);
  }
  return path_score_impl(w, feats, tags) - m.log_z;
}

void check_lengths(const SequenceFeatures& feats, const TagSeq& tags) {
  if (feats.size() != tags.size()) throw Error("tag sequence length does not match tokens");
  if (feats.empty()) throw Error("empty sequence");
}

}  // namespace

Marginals forward_backward(const CrfModel& model, const SequenceFeatures& feats) {
  return forward_backward_impl(WeightView(model), feats);
}

ViterbiResult viterbi(const CrfModel& model, const SequenceFeatures& feats) {
  if (feats.empty()) throw Error("viterbi: empty sequence");
  const WeightView w(model);
  const std::size_t n = feats.size();
  Emissions em = emissions(w, feats);
  // best[i][t]: best score of positions i..n-1 given tag t at i, including
  // the stop transition.
  std::vector<std::array<double, 2>> best(n);
  for (int t = 0; t < 2; ++t) best[n - 1][t] = em[n - 1][t] + w.stop(t);
  for (std::size_t i = n - 1; i-- > 0;) {
    for (int t = 0; t < 2; ++t) {
      best[i][t] = em[i][t] + std::max(w.trans(t, 0) + best[i + 1][0], w.trans(t, 1) + best[i + 1][1]);
    }
  }
  // Decode left to right taking the smallest tag that attains the maximum.
  ViterbiResult r;
  r.tags.resize(n);
  double c0 = w.start(0) + best[0][0];
  double c1 = w.start(1) + best[0][1];
  int cur = c1 > c0 ? 1 : 0;
  r.score = std::max(c0, c1);
  r.tags[0] = static_cast<Tag>(cur);
  for (std::size_t i = 1; i < n; ++i) {
    double d0 = w.trans(cur, 0) + best[i][0];
    double d1 = w.trans(cur, 1) + best[i][1];
    cur = d1 > d0 ? 1 : 0;
    r.tags[i] = static_cast<Tag>(cur);
  }
  return r;
}

double path_score(const CrfModel& model, const SequenceFeatures& feats, const TagSeq& tags) {
  check_lengths(feats, tags);
  return path_score_impl(WeightView(model), feats, tags);
}

double log_likelihood(const CrfModel& model, const SequenceFeatures& feats, const TagSeq& tags) {
  check_lengths(feats, tags);
  WeightView w(model);
  return path_score_impl(w, feats, tags) - forward_backward_impl(w, feats).log_z;
}

void add_log_likelihood_gradient(const CrfModel& model, const SequenceFeatures& feats,
                                 const TagSeq& tags, double scale, std::span<double> grad) {
  check_lengths(feats, tags);
  if (grad.size() != model.param_count()) throw Error("gradient buffer has wrong size");
  accumulate_gradient(WeightView(model), feats, tags, scale, grad);
}

TagSeq tag_tokens(const CrfModel& model, const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {};
  return viterbi(model, model.encode(tokens)).tags;
}

// ---------------------------------------------------------------------------
// Training

double crf_objective(const CrfModel& model, std::span<const SequenceFeatures> feats,
                     std::span<const TagSeq> tags) {
  double nll = 0.0;
  for (std::size_t i = 0; i < feats.size(); ++i) nll -= log_likelihood(model, feats[i], tags[i]);
  double sq = 0.0;
  for (double v : model.weights()) sq += v * v;
  return (feats.empty() ? 0.0 : nll / static_cast<double>(feats.size())) + 0.5 * model.l2() * sq;
}

CrfModel train_crf(std::span<const CrfExample> examples, const CrfTrainConfig& config,
                   std::vector<double>* objective_history) {
  if (examples.empty()) throw Error("train_crf: empty training set");
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].tokens.size() != examples[i].tags.size()) {
      throw Error("train_crf: example " + std::to_string(i) + " has " +
                  std::to_string(examples[i].tokens.size()) + " tokens but " +
                  std::to_string(examples[i].tags.size()) + " tags");
    }
    if (examples[i].tokens.empty()) {
      throw Error("train_crf: example " + std::to_string(i) + " is empty");
    }
  }
  if (config.batch_size == 0) throw Error("train_crf: batch_size must be positive");

  std::map<std::string, std::size_t> counts;
  for (const CrfExample& ex : examples) {
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      for (std::string& f : featurize(ex.tokens, i)) ++counts[std::move(f)];
    }
  }
  std::vector<std::string> names;
  for (auto& [name, c] : counts) {
    if (c >= config.min_feature_count) names.push_back(name);
  }
  CrfModel model(FeatureVocab(std::move(names)), config.l2);

  std::vector<SequenceFeatures> feats;
  std::vector<TagSeq> tags;
  feats.reserve(examples.size());
  tags.reserve(examples.size());
  for (const CrfExample& ex : examples) {
    feats.push_back(model.encode(ex.tokens));
    tags.push_back(ex.tags);
  }

  // w = scale * raw. Each batch takes a gradient step on the mean
  // log-likelihood and then the implicit L2 shrink w /= (1 + step * l2).
  std::vector<double> raw(model.param_count(), 0.0);
  double scale = 1.0;
  std::vector<double> grad(model.param_count(), 0.0);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);

  auto materialize = [&] {
    auto w = model.weights();
    for (std::size_t k = 0; k < raw.size(); ++k) w[k] = scale * raw[k];
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double step = config.step / (1.0 + config.decay * epoch);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const double inv = 1.0 / static_cast<double>(e - b);
      WeightView view(model, raw, scale);
      std::vector<std::uint32_t> touched;
      for (std::size_t k = b; k < e; ++k) {
        const std::size_t idx = order[k];
        accumulate_gradient(view, feats[idx], tags[idx], inv, grad);
        for (const auto& pos : feats[idx]) touched.insert(touched.end(), pos.begin(), pos.end());
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      const double factor = step / scale;
      for (std::uint32_t f : touched) {
        for (std::size_t t = 0; t < 2; ++t) {
          raw[std::size_t{f} * 2 + t] += factor * grad[std::size_t{f} * 2 + t];
          grad[std::size_t{f} * 2 + t] = 0.0;
        }
      }
      for (std::size_t k = model.vocab().size() * 2; k < raw.size(); ++k) {
        raw[k] += factor * grad[k];
        grad[k] = 0.0;
      }
      scale /= (1.0 + step * config.l2);
      if (scale < 1e-9) {
        for (double& v : raw) v *= scale;
        scale = 1.0;
      }
    }
    if (objective_history) {
      materialize();
      objective_history->push_back(crf_objective(model, feats, tags));
    }
  }
  materialize();
  return model;
}

// ---------------------------------------------------------------------------
// Persistence

std::string CrfModel::serialize() const {
  std::ostringstream out;
  out << "kgqa-crf v1\n";
  out << "l2\t" << io::format_double(l2_) << '\n';
  out << "features\t" << vocab_.size() << '\n';
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) out << i << '\t' << vocab_.name(i) << '\n';
  out << "weights\n";
  for (std::uint32_t f = 0; f < vocab_.size(); ++f) {
    for (Tag t : {Tag::NotEntity, Tag::Entity}) {
      double v = weights_[emission_index(f, t)];
      if (v != 0.0) out << f << '\t' << tag_char(t) << '\t' << io::format_double(v) << '\n';
    }
  }
  for (Tag a : {Tag::NotEntity, Tag::Entity}) {
    for (Tag b : {Tag::NotEntity, Tag::Entity}) {
      out << "transition\t" << tag_char(a) << '\t' << tag_char(b) << '\t'
          << io::format_double(weights_[transition_index(a, b)]) << '\n';
    }
  }
  for (Tag t : {Tag::NotEntity, Tag::Entity}) {
    out << "start\t" << tag_char(t) << '\t' << io::format_double(weights_[start_index(t)]) << '\n';
  }
  for (Tag t : {Tag::NotEntity, Tag::Entity}) {
    out << "stop\t" << tag_char(t) << '\t' << io::format_double(weights_[stop_index(t)]) << '\n';
  }
  out << "end\n";
  return out.str();
}

CrfModel CrfModel::deserialize(std::string_view text, const std::string& source) {
  std::vector<std::string_view> lines = io::split(text, '\n');
  std::size_t ln = 0;
  auto next = [&]() -> std::string_view {
    if (ln >= lines.size()) throw ParseError(source, ln, "unexpected end of file");
    return io::chomp(lines[ln++]);
  };
  auto fail = [&](const std::string& what) -> ParseError { return ParseError(source, ln, what); };

  try {
    if (next() != "kgqa-crf v1") throw fail("bad header");
    auto l2f = io::split(next(), '\t');
    if (l2f.size() != 2 || l2f[0] != "l2") throw fail("expected l2 line");
    double l2 = io::parse_double(l2f[1]);
    auto ff = io::split(next(), '\t');
    if (ff.size() != 2 || ff[0] != "features") throw fail("expected features line");
    auto count = static_cast<std::size_t>(io::parse_int(ff[1]));
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto f = io::split(next(), '\t');
      if (f.size() != 2 || static_cast<std::size_t>(io::parse_int(f[0])) != i) {
        throw fail("bad feature line");
      }
      names.emplace_back(f[1]);
    }
    if (!std::is_sorted(names.begin(), names.end())) throw fail("feature names not sorted");
    CrfModel model(FeatureVocab(names), l2);
    if (model.vocab().size() != count) throw fail("duplicate feature names");
    if (next() != "weights") throw fail("expected weights section");
    while (true) {
      std::string_view line = next();
      if (line == "end") break;
      auto f = io::split(line, '\t');
      if (f.size() == 3 && f[0] == "start") {
        model.weights_[model.start_index(parse_tag(f[1]))] = io::parse_double(f[2]);
      } else if (f.size() == 3 && f[0] == "stop") {
        model.weights_[model.stop_index(parse_tag(f[1]))] = io::parse_double(f[2]);
      } else if (f.size() == 4 && f[0] == "transition") {
        model.weights_[model.transition_index(parse_tag(f[1]), parse_tag(f[2]))] =
            io::parse_double(f[3]);
      } else if (f.size() == 3) {
        auto id = io::parse_int(f[0]);
        if (id < 0 || static_cast<std::size_t>(id) >= count) throw fail("feature id out of range");
        model.weights_[model.emission_index(static_cast<std::uint32_t>(id), parse_tag(f[1]))] =
            io::parse_double(f[2]);
      } else {
        throw fail("unrecognized line");
      }
    }
    for (double v : model.weights_) {
      if (!std::isfinite(v)) throw fail("non-finite weight");
    }
    return model;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

void CrfModel::save(const std::filesystem::path& path) const {
  io::write_file_atomic(path, serialize());
}

CrfModel CrfModel::load(const std::filesystem::path& path) {
  return deserialize(io::read_file(path), path.string());
}

}  // namespace kgqa
