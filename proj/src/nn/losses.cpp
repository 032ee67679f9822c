#include "chromoseg/nn/losses.hpp"

#include "chromoseg/error.hpp"

namespace chromoseg::nn {

namespace {

void check_inputs(const torch::Tensor& probs, const torch::Tensor& labels) {
  if (probs.dim() != 4 || labels.dim() != 3 || probs.size(0) != labels.size(0) ||
      probs.size(2) != labels.size(1) || probs.size(3) != labels.size(2)) {
    throw InvalidInput("expected probabilities [B,C,H,W] and labels [B,H,W]");
  }
}

// [C, P] errors and indicators for a single image.
torch::Tensor lovasz_flat(const torch::Tensor& probs, const torch::Tensor& labels,
                          const losses::LossConfig& cfg) {
  const auto classes = probs.size(0);
  const auto fg = torch::arange(classes, labels.options()).unsqueeze(1).eq(labels.unsqueeze(0)).to(probs.dtype());
  const auto errors = fg * (1.0 - probs) + (1.0 - fg) * probs;
  // Stable descending sort keeps equal errors in pixel order.
  const auto [sorted, perm] = torch::sort(errors, /*stable=*/true, /*dim=*/1, /*descending=*/true);
  const auto gt_sorted = fg.gather(1, perm);
  const auto per_class = (sorted * lovasz_grad(gt_sorted)).sum(1);
  if (!cfg.present_classes_only) return per_class.mean();
  const auto present = fg.sum(1) > 0;
  if (!present.any().item<bool>()) return probs.sum() * 0.0;
  return per_class.masked_select(present).mean();
}

torch::Tensor resolved_weights(const torch::Tensor& w, std::int64_t classes, const torch::Tensor& like) {
  if (!w.defined()) return torch::ones({classes}, like.options());
  if (w.numel() != classes) throw InvalidInput("one weight per class required");
  if ((w <= 0).any().item<bool>()) throw InvalidInput("class weights must be positive");
  return w.to(like.dtype());
}

}  // namespace

torch::Tensor lovasz_grad(const torch::Tensor& gt_sorted) {
  if (gt_sorted.size(-1) == 0) return gt_sorted.clone();
  const auto total = gt_sorted.sum(-1, /*keepdim=*/true);
  const auto intersection = total - gt_sorted.cumsum(-1);
  const auto uni = total + (1.0 - gt_sorted).cumsum(-1);
  auto jaccard = 1.0 - intersection / uni;
  const auto p = gt_sorted.size(-1);
  if (p > 1) {
    auto head = jaccard.narrow(-1, 0, 1);
    auto tail = jaccard.narrow(-1, 1, p - 1) - jaccard.narrow(-1, 0, p - 1);
    jaccard = torch::cat({head, tail}, -1);
  }
  return jaccard;
}

torch::Tensor lovasz_softmax(const torch::Tensor& probs, const torch::Tensor& labels,
                             const losses::LossConfig& cfg) {
  check_inputs(probs, labels);
  const auto classes = probs.size(1);
  if (!cfg.per_image) {
    const auto flat_p = probs.permute({1, 0, 2, 3}).reshape({classes, -1});
    return lovasz_flat(flat_p, labels.reshape({-1}), cfg);
  }
  std::vector<torch::Tensor> per_image;
  for (std::int64_t b = 0; b < probs.size(0); ++b) {
    per_image.push_back(lovasz_flat(probs[b].reshape({classes, -1}), labels[b].reshape({-1}), cfg));
  }
  return torch::stack(per_image).mean();
}

torch::Tensor cross_entropy(const torch::Tensor& probs, const torch::Tensor& labels,
                            const torch::Tensor& class_weights) {
  check_inputs(probs, labels);
  const auto w = resolved_weights(class_weights, probs.size(1), probs);
  const auto picked = probs.gather(1, labels.unsqueeze(1)).squeeze(1);  // [B,H,W]
  const auto pixel_w = w.index_select(0, labels.reshape({-1})).reshape(labels.sizes());
  // Floor keeps an underflowed float softmax from producing -inf.
  const auto nll = -(pixel_w * picked.clamp_min(1e-30).log()).sum({1, 2}) / pixel_w.sum({1, 2});
  return nll.mean();
}

torch::Tensor soft_dice_loss(const torch::Tensor& probs, const torch::Tensor& labels,
                             const torch::Tensor& class_weights) {
  check_inputs(probs, labels);
  const auto classes = probs.size(1);
  const auto w = resolved_weights(class_weights, classes, probs);
  const auto onehot = torch::one_hot(labels, classes).permute({0, 3, 1, 2}).to(probs.dtype());
  const auto overlap = (probs * onehot).sum({2, 3});
  const auto mass = (probs + onehot).sum({2, 3});
  const auto dice = (2.0 * overlap + losses::kDiceSmoothing) / (mass + losses::kDiceSmoothing);  // [B,C]
  const auto weighted = (dice * w.unsqueeze(0)).sum(1) / w.sum();
  return (1.0 - weighted).mean();
}

torch::Tensor segmentation_loss(const torch::Tensor& probs, const torch::Tensor& labels,
                                const losses::LossConfig& cfg) {
  const auto weights = [&] {
    return torch::tensor(std::vector<double>(cfg.class_weights.begin(), cfg.class_weights.end()),
                         probs.options())
        .narrow(0, 0, probs.size(1));
  };
  switch (cfg.kind) {
    case losses::LossKind::kLovasz: return lovasz_softmax(probs, labels, cfg);
    case losses::LossKind::kCrossEntropy: return cross_entropy(probs, labels);
    case losses::LossKind::kWeightedCrossEntropy: return cross_entropy(probs, labels, weights());
    case losses::LossKind::kDice: return soft_dice_loss(probs, labels);
    case losses::LossKind::kWeightedDice: return soft_dice_loss(probs, labels, weights());
  }
  throw InvalidInput("unknown loss kind");
}

torch::Tensor lsgan_discriminator_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores) {
  if (real_scores.sizes() != fake_scores.sizes()) throw InvalidInput("real and fake score maps differ in shape");
  return (real_scores - 1.0).pow(2).mean() + fake_scores.pow(2).mean();
}

torch::Tensor lsgan_generator_loss(const torch::Tensor& fake_scores) {
  return (fake_scores - 1.0).pow(2).mean();
}

GeneratorLoss generator_objective(const torch::Tensor& fake_scores, const torch::Tensor& probs,
                                  const torch::Tensor& labels, const losses::LossConfig& cfg) {
  GeneratorLoss out;
  out.segmentation = segmentation_loss(probs, labels, cfg);
  out.adversarial = fake_scores.defined() ? lsgan_generator_loss(fake_scores)
                                          : torch::zeros({}, probs.options());
  out.total = out.adversarial + cfg.lambda * out.segmentation;
  return out;
}

}  // namespace chromoseg::nn
