#include "occtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "occtrack/association.hpp"

namespace occtrack {

void TrackTable::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const TrackRow& a, const TrackRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
}

int TrackTable::frame_count() const {
  int last = 0;
  for (const TrackRow& r : rows) last = std::max(last, r.frame);
  return last;
}

FrameMatch match_frame(const FrameBoxes& gt, const FrameBoxes& pred, double iou_thr,
                       const std::map<int, int>& carry) {
  if (gt.ids.size() != gt.boxes.size() || pred.ids.size() != pred.boxes.size())
    throw std::invalid_argument("match_frame: id/box counts differ");

  FrameMatch out;
  std::vector<char> gt_done(gt.ids.size(), 0);
  std::vector<char> pred_done(pred.ids.size(), 0);

  // Correspondences from the previous frame persist while they clear the gate.
  for (std::size_t g = 0; g < gt.ids.size(); ++g) {
    const auto it = carry.find(gt.ids[g]);
    if (it == carry.end()) continue;
    for (std::size_t p = 0; p < pred.ids.size(); ++p) {
      if (pred_done[p] || pred.ids[p] != it->second) continue;
      if (iou(gt.boxes[g], pred.boxes[p]) >= iou_thr) {
        out.matches.emplace_back(static_cast<int>(g), static_cast<int>(p));
        gt_done[g] = 1;
        pred_done[p] = 1;
      }
      break;
    }
  }

  // Remaining boxes: minimum-cost IoU assignment, gated at the threshold.
  std::vector<int> g_idx, p_idx;
  std::vector<BoundingBox> g_boxes, p_boxes;
  for (std::size_t g = 0; g < gt.ids.size(); ++g)
    if (!gt_done[g]) {
      g_idx.push_back(static_cast<int>(g));
      g_boxes.push_back(gt.boxes[g]);
    }
  for (std::size_t p = 0; p < pred.ids.size(); ++p)
    if (!pred_done[p]) {
      p_idx.push_back(static_cast<int>(p));
      p_boxes.push_back(pred.boxes[p]);
    }

  const MatchResult assigned =
      hungarian(iou_distance_matrix(g_boxes, p_boxes), 1.0 - iou_thr + 1e-9);
  for (const auto& [gi, pi] : assigned.matches)
    out.matches.emplace_back(g_idx[static_cast<std::size_t>(gi)],
                             p_idx[static_cast<std::size_t>(pi)]);
  std::sort(out.matches.begin(), out.matches.end());

  std::set<int> matched_g, matched_p;
  for (const auto& [g, p] : out.matches) {
    matched_g.insert(g);
    matched_p.insert(p);
  }
  for (std::size_t g = 0; g < gt.ids.size(); ++g)
    if (!matched_g.count(static_cast<int>(g))) out.unmatched_gt.push_back(static_cast<int>(g));
  for (std::size_t p = 0; p < pred.ids.size(); ++p)
    if (!matched_p.count(static_cast<int>(p))) out.unmatched_pred.push_back(static_cast<int>(p));
  return out;
}

namespace {

std::map<int, FrameBoxes> by_frame(const TrackTable& t) {
  std::map<int, FrameBoxes> out;
  for (const TrackRow& r : t.rows) {
    out[r.frame].ids.push_back(r.id);
    out[r.frame].boxes.push_back(r.box);
  }
  return out;
}

long id_overlap_maximum(const TrackTable& gt, const TrackTable& pred, double iou_thr) {
  // Count, per (gt id, pred id) pair, the frames where the boxes overlap at
  // the gate; the global identity assignment maximizes the total.
  std::map<std::pair<int, int>, long> overlap;
  const auto gt_frames = by_frame(gt);
  const auto pred_frames = by_frame(pred);
  for (const auto& [frame, g] : gt_frames) {
    const auto it = pred_frames.find(frame);
    if (it == pred_frames.end()) continue;
    const FrameBoxes& p = it->second;
    for (std::size_t gi = 0; gi < g.ids.size(); ++gi)
      for (std::size_t pi = 0; pi < p.ids.size(); ++pi)
        if (iou(g.boxes[gi], p.boxes[pi]) >= iou_thr)
          ++overlap[{g.ids[gi], p.ids[pi]}];
  }

  std::set<int> gt_ids, pred_ids;
  for (const TrackRow& r : gt.rows) gt_ids.insert(r.id);
  for (const TrackRow& r : pred.rows) pred_ids.insert(r.id);
  if (gt_ids.empty() || pred_ids.empty()) return 0;

  std::vector<int> g_list(gt_ids.begin(), gt_ids.end());
  std::vector<int> p_list(pred_ids.begin(), pred_ids.end());
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(g_list.size()), static_cast<Eigen::Index>(p_list.size()));
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const auto it = overlap.find({g_list[static_cast<std::size_t>(i)],
                                    p_list[static_cast<std::size_t>(j)]});
      if (it != overlap.end()) cost(i, j) = -static_cast<double>(it->second);
    }

  const MatchResult assigned = hungarian(cost, std::numeric_limits<double>::infinity());
  long total = 0;
  for (const auto& [i, j] : assigned.matches)
    total += -static_cast<long>(cost(i, j));
  return total;
}

}  // namespace

MetricsReport evaluate(const TrackTable& gt, const TrackTable& pred, double iou_thr,
                       std::vector<MetricsEvent>* events) {
  MetricsReport rep;
  rep.gt_count = static_cast<long>(gt.rows.size());

  const auto gt_frames = by_frame(gt);
  const auto pred_frames = by_frame(pred);
  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : pred_frames) frames.insert(f);

  std::map<int, int> carry;        // gt id -> pred id matched last frame
  std::map<int, int> last_match;   // gt id -> pred id at the most recent match
  const FrameBoxes empty;

  for (int frame : frames) {
    const auto git = gt_frames.find(frame);
    const auto pit = pred_frames.find(frame);
    const FrameBoxes& g = git != gt_frames.end() ? git->second : empty;
    const FrameBoxes& p = pit != pred_frames.end() ? pit->second : empty;

    const FrameMatch m = match_frame(g, p, iou_thr, carry);

    rep.false_positives += static_cast<long>(m.unmatched_pred.size());
    rep.false_negatives += static_cast<long>(m.unmatched_gt.size());
    if (events) {
      for (int pi : m.unmatched_pred)
        events->push_back({MetricsEvent::Kind::FalsePositive, frame, -1,
                           p.ids[static_cast<std::size_t>(pi)]});
      for (int gi : m.unmatched_gt)
        events->push_back({MetricsEvent::Kind::FalseNegative, frame,
                           g.ids[static_cast<std::size_t>(gi)], -1});
    }

    carry.clear();
    for (const auto& [gi, pi] : m.matches) {
      const int gid = g.ids[static_cast<std::size_t>(gi)];
      const int pid = p.ids[static_cast<std::size_t>(pi)];
      const auto it = last_match.find(gid);
      if (it != last_match.end() && it->second != pid) {
        ++rep.id_switches;
        if (events)
          events->push_back({MetricsEvent::Kind::IdSwitch, frame, gid, pid});
      }
      last_match[gid] = pid;
      carry[gid] = pid;
    }
  }

  rep.idtp = id_overlap_maximum(gt, pred, iou_thr);
  rep.idfp = static_cast<long>(pred.rows.size()) - rep.idtp;
  rep.idfn = static_cast<long>(gt.rows.size()) - rep.idtp;

  rep.mota = rep.gt_count > 0
                 ? 1.0 - static_cast<double>(rep.false_positives + rep.false_negatives +
                                             rep.id_switches) /
                             static_cast<double>(rep.gt_count)
                 : 1.0;
  const long denom = 2 * rep.idtp + rep.idfp + rep.idfn;
  rep.idf1 = denom > 0 ? 2.0 * static_cast<double>(rep.idtp) / static_cast<double>(denom)
                       : 1.0;
  return rep;
}

MetricsReport merge_reports(const std::vector<MetricsReport>& reports) {
  MetricsReport out;
  for (const MetricsReport& r : reports) {
    out.id_switches += r.id_switches;
    out.false_positives += r.false_positives;
    out.false_negatives += r.false_negatives;
    out.gt_count += r.gt_count;
    out.idtp += r.idtp;
    out.idfp += r.idfp;
    out.idfn += r.idfn;
  }
  out.mota = out.gt_count > 0
                 ? 1.0 - static_cast<double>(out.false_positives + out.false_negatives +
                                             out.id_switches) /
                             static_cast<double>(out.gt_count)
                 : 1.0;
  const long denom = 2 * out.idtp + out.idfp + out.idfn;
  out.idf1 = denom > 0 ? 2.0 * static_cast<double>(out.idtp) / static_cast<double>(denom)
                       : 1.0;
  return out;
}

std::string format_report(const MetricsReport& r) {
  std::ostringstream os;
  os << "mota=" << r.mota << "\n"
     << "idf1=" << r.idf1 << "\n"
     << "id_switches=" << r.id_switches << "\n"
     << "false_positives=" << r.false_positives << "\n"
     << "false_negatives=" << r.false_negatives << "\n"
     << "gt_count=" << r.gt_count << "\n"
     << "idtp=" << r.idtp << "\n"
     << "idfp=" << r.idfp << "\n"
     << "idfn=" << r.idfn << "\n";
  return os.str();
}

}  // namespace occtrack
