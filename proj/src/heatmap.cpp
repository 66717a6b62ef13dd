#include "endurq/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace endurq {

std::uint64_t HeatMap::total_density() const {
    std::uint64_t total = 0;
    for (const auto& row : density)
        for (auto d : row) total += d;
    return total;
}

std::size_t HeatMap::system_index(const std::string& id) const {
    for (std::size_t i = 0; i < systems.size(); ++i)
        if (systems[i] == id) return i;
    return npos;
}

HeatMap build_heatmap(const EventTrace& trace, double bucket_width,
                      const std::vector<std::string>& system_order,
                      std::size_t min_buckets) {
    if (!(bucket_width > 0.0))
        throw std::invalid_argument("build_heatmap: bucket_width must be > 0");

    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < system_order.size(); ++i) column[system_order[i]] = i;

    std::size_t buckets = min_buckets;
    for (const auto& e : trace.events) {
        if (e.timestamp < 0.0)
            throw std::invalid_argument("build_heatmap: negative timestamp");
        const auto b = static_cast<std::size_t>(std::floor(e.timestamp / bucket_width));
        buckets = std::max(buckets, b + 1);
    }

    HeatMap hm;
    hm.buckets = buckets;
    hm.systems = system_order;
    hm.bucket_width = bucket_width;
    hm.density.assign(buckets, std::vector<std::uint64_t>(system_order.size(), 0));
    hm.peak_mask.assign(buckets, std::vector<std::uint8_t>(system_order.size(), 0));

    for (const auto& e : trace.events) {
        const auto it = column.find(e.system_id);
        if (it == column.end())
            throw std::invalid_argument("build_heatmap: unknown system_id: " + e.system_id);
        const auto b = static_cast<std::size_t>(std::floor(e.timestamp / bucket_width));
        hm.density[b][it->second] += e.item_count;
    }
    return hm;
}

HeatMap build_heatmap(const EventTrace& trace, double bucket_width) {
    std::set<std::string> ids;
    for (const auto& e : trace.events) ids.insert(e.system_id);
    return build_heatmap(trace, bucket_width,
                         std::vector<std::string>(ids.begin(), ids.end()));
}

HeatMap overlay_peak_demand(HeatMap hm,
                            const std::vector<std::vector<double>>& demand,
                            double quantile) {
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("overlay_peak_demand: quantile must be in (0, 1]");
    if (demand.size() != hm.buckets)
        throw std::invalid_argument("overlay_peak_demand: demand row count mismatch");
    for (const auto& row : demand)
        if (row.size() != hm.systems.size())
            throw std::invalid_argument("overlay_peak_demand: demand column count mismatch");

    const std::size_t n = hm.buckets;
    for (std::size_t s = 0; s < hm.systems.size(); ++s) {
        std::vector<double> col(n);
        for (std::size_t b = 0; b < n; ++b) col[b] = demand[b][s];
        std::sort(col.begin(), col.end());
        // Nearest-rank threshold: the smallest value with more than a
        // `quantile` fraction of the column at or below it.
        const auto rank = std::min(n - 1, static_cast<std::size_t>(
                                              std::floor(quantile * static_cast<double>(n))));
        const double threshold = col[rank];
        for (std::size_t b = 0; b < n; ++b)
            hm.peak_mask[b][s] = demand[b][s] >= threshold ? 1 : 0;
    }
    return hm;
}

PlacementPoint select_queue_position(const HeatMap& hm, const DisjointPartition& part) {
    if (part.k < 2)
        throw std::invalid_argument("select_queue_position: need at least two groups");
    if (hm.buckets < 1)
        throw std::invalid_argument("select_queue_position: heat map has no buckets");

    const auto group_columns = [&](std::size_t g) {
        std::vector<std::size_t> cols;
        for (const auto& score : part.sets[g]) {
            const auto idx = hm.system_index(score.system_id);
            if (idx != HeatMap::npos) cols.push_back(idx);
        }
        return cols;
    };

    std::size_t best_boundary = 0;
    std::uint64_t best_total = 0;
    std::vector<std::size_t> best_cols;
    for (std::size_t b = 0; b + 1 < part.k; ++b) {
        auto cols = group_columns(b);
        const auto upper = group_columns(b + 1);
        cols.insert(cols.end(), upper.begin(), upper.end());
        std::uint64_t total = 0;
        for (std::size_t bucket = 0; bucket < hm.buckets; ++bucket)
            for (auto c : cols) total += hm.density[bucket][c];
        if (b == 0 || total > best_total) {
            best_boundary = b;
            best_total = total;
            best_cols = cols;
        }
    }

    std::size_t best_bucket = 0;
    std::uint64_t best_bucket_density = 0;
    for (std::size_t bucket = 0; bucket < hm.buckets; ++bucket) {
        std::uint64_t d = 0;
        for (auto c : best_cols) d += hm.density[bucket][c];
        if (bucket == 0 || d > best_bucket_density) {
            best_bucket = bucket;
            best_bucket_density = d;
        }
    }

    return PlacementPoint{best_boundary, best_bucket, true};
}

Anchor check_release(Anchor anchor, double ratio, double eps) {
    if (ratio < 0.0)
        throw std::invalid_argument("check_release: ratio must be >= 0");
    if (std::abs(ratio - 1.0) <= eps || ratio > 1.0) anchor.released = true;
    return anchor;
}

std::string export_heatmap(const HeatMap& hm, HeatMapFormat format) {
    std::ostringstream out;
    if (format == HeatMapFormat::csv) {
        out << "bucket";
        for (const auto& id : hm.systems) out << ',' << id;
        out << '\n';
        for (std::size_t b = 0; b < hm.buckets; ++b) {
            out << b;
            for (std::size_t s = 0; s < hm.systems.size(); ++s)
                out << ',' << hm.density[b][s];
            out << '\n';
        }
        return out.str();
    }

    // P6: width = systems, height = buckets, gray scaled by max density,
    // peak cells at full red.
    std::uint64_t max_density = 0;
    for (const auto& row : hm.density)
        for (auto d : row) max_density = std::max(max_density, d);

    out << "P6\n" << hm.systems.size() << ' ' << hm.buckets << "\n255\n";
    for (std::size_t b = 0; b < hm.buckets; ++b) {
        for (std::size_t s = 0; s < hm.systems.size(); ++s) {
            const auto gray = static_cast<unsigned char>(
                max_density == 0 ? 0 : (hm.density[b][s] * 255) / max_density);
            const unsigned char red = hm.peak_mask[b][s] ? 255 : gray;
            out.put(static_cast<char>(red));
            out.put(static_cast<char>(gray));
            out.put(static_cast<char>(gray));
        }
    }
    return out.str();
}

HeatMap import_heatmap_csv(std::istream& in, double bucket_width) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("heatmap csv: missing header");
    if (line.size() && line.back() == '\r') line.pop_back();

    HeatMap hm;
    hm.bucket_width = bucket_width;
    {
        std::istringstream header(line);
        std::string field;
        if (!std::getline(header, field, ',') || field != "bucket")
            throw std::invalid_argument("heatmap csv: first column must be 'bucket'");
        while (std::getline(header, field, ',')) hm.systems.push_back(field);
    }

    while (std::getline(in, line)) {
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ','); // bucket index, implied by position
        std::vector<std::uint64_t> cells;
        while (std::getline(row, field, ',')) cells.push_back(std::stoull(field));
        if (cells.size() != hm.systems.size())
            throw std::invalid_argument("heatmap csv: row width mismatch");
        hm.density.push_back(std::move(cells));
    }
    hm.buckets = hm.density.size();
    hm.peak_mask.assign(hm.buckets, std::vector<std::uint8_t>(hm.systems.size(), 0));
    return hm;
}

} // namespace endurq
