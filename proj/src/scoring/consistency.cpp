#include "forge3d/scoring/consistency.hpp"

#include "forge3d/imaging/saliency.hpp"

namespace forge3d::scoring {

std::vector<ViewAnalysis> analyze_views(const MultiViewSet& set,
                                        providers::SegmentationProvider& seg) {
  set.validate();
  std::vector<ViewAnalysis> out;
  out.reserve(set.views.size());
  for (std::size_t i = 0; i < set.views.size(); ++i) {
    const auto& view = set.views[i];
    ViewAnalysis va;
    va.lab = imaging::rgb_to_lab(view);
    try {
      va.mask = seg.segment(view);
    } catch (const providers::ProviderError&) {
      va.mask = imaging::BinaryMask(view.width(), view.height());
    }
    if (va.mask.empty()) {
      try {
        va.mask = imaging::saliency_mask(view).mask;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::no_foreground) throw;
        throw Error(ErrorCode::unscorable, "view " + std::to_string(i) + " has no foreground",
                    "scoring");
      }
    }
    va.lab_hist = imaging::histogram(va.lab, imaging::HistogramMode::lab3d, &va.mask);
    va.light_hist = imaging::histogram(va.lab, imaging::HistogramMode::l_channel, &va.mask);
    out.push_back(std::move(va));
  }
  return out;
}

std::vector<double> per_view_consistency(std::span<const imaging::Histogram> hists) {
  const auto mean = imaging::mean_histogram(hists);
  std::vector<double> out;
  out.reserve(hists.size());
  for (const auto& h : hists) out.push_back(imaging::bhattacharyya(h, mean));
  return out;
}

double consistency_from_histograms(std::span<const imaging::Histogram> hists) {
  const auto per_view = per_view_consistency(hists);
  double sum = 0.0;
  for (const double v : per_view) sum += v;
  return sum / static_cast<double>(per_view.size());
}

double view_consistency(std::span<const ViewAnalysis> views, Channel channel) {
  if (views.size() != static_cast<std::size_t>(kViewCount)) {
    throw Error(ErrorCode::invalid_argument, "consistency needs 9 views", "scoring");
  }
  std::vector<imaging::Histogram> hists;
  hists.reserve(views.size());
  for (const auto& v : views) hists.push_back(channel == Channel::color ? v.lab_hist : v.light_hist);
  return consistency_from_histograms(hists);
}

} // namespace forge3d::scoring
