#include <cmath>

#include "lesvote/classifiers.hpp"
#include "lesvote/error.hpp"

namespace lesvote::ml {

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::size_t ConfusionMatrix::column_total(std::size_t actual) const {
  std::size_t t = 0;
  for (std::size_t p = 0; p < num_classes; ++p) t += (*this)(p, actual);
  return t;
}

Evaluation evaluate(std::span<const int> predicted, std::span<const int> actual,
                    std::size_t num_classes, int positive_class) {
  require(predicted.size() == actual.size(), ErrorKind::shape,
          "prediction and label counts differ");
  require(!actual.empty(), ErrorKind::insufficient_data, "nothing to evaluate");
  require(num_classes >= 1, ErrorKind::parameter, "need at least one class");

  Evaluation ev;
  ev.confusion.num_classes = num_classes;
  ev.confusion.counts.assign(num_classes * num_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const auto p = static_cast<std::size_t>(predicted[i]);
    const auto a = static_cast<std::size_t>(actual[i]);
    require(p < num_classes && a < num_classes, ErrorKind::value, "class index out of range");
    ++ev.confusion.counts[p * num_classes + a];
    if (p == a) ++correct;
  }
  ev.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(actual.size());

  if (num_classes == 2) {
    const auto pos = static_cast<std::size_t>(positive_class);
    require(pos < 2, ErrorKind::parameter, "positive class must be 0 or 1");
    const std::size_t neg = 1 - pos;
    const auto tp = static_cast<double>(ev.confusion(pos, pos));
    const auto fn = static_cast<double>(ev.confusion(neg, pos));
    const auto tn = static_cast<double>(ev.confusion(neg, neg));
    const auto fp = static_cast<double>(ev.confusion(pos, neg));
    if (tp + fn > 0) ev.sensitivity = 100.0 * tp / (tp + fn);
    if (tn + fp > 0) ev.specificity = 100.0 * tn / (tn + fp);
  }
  return ev;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.mse = ss / static_cast<double>(values.size());
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

}  // namespace lesvote::ml
