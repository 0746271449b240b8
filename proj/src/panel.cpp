#include "clustab/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "clustab/dates.hpp"
#include "clustab/error.hpp"
#include "clustab/format.hpp"

namespace clustab {

std::string to_string(VariationKind kind) {
    return kind == VariationKind::diff ? "diff" : "log_diff";
}

VariationKind variation_kind_from_string(const std::string& s) {
    if (s == "diff") return VariationKind::diff;
    if (s == "log_diff") return VariationKind::log_diff;
    throw Error("data", "unknown variation kind '" + s + "' (expected diff or log_diff)");
}

void PricePanel::validate() const {
    const std::size_t n = asset_ids.size();
    const std::size_t t = dates.size();
    if (n < 2) throw Error("data", "panel needs at least 2 assets, got " + std::to_string(n));
    if (t < 3) throw Error("data", "panel needs at least 3 dates, got " + std::to_string(t));
    if (values.rows() != n || values.cols() != t) {
        throw Error("data", "panel shape mismatch: " + std::to_string(values.rows()) + "x" +
                                std::to_string(values.cols()) + " values for " + std::to_string(n) +
                                " assets x " + std::to_string(t) + " dates");
    }
    for (std::size_t i = 0; i < t; ++i) {
        if (!is_valid_iso_date(dates[i])) {
            throw Error("data", "invalid date '" + dates[i] + "'");
        }
        if (i > 0 && !(dates[i - 1] < dates[i])) {
            throw Error("data", "dates not strictly increasing at '" + dates[i] + "'");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            for (std::size_t j = 0; j < i; ++j) {
                if (asset_ids[j] == asset_ids[i]) {
                    throw Error("data", "duplicate asset id '" + asset_ids[i] + "'");
                }
            }
        }
        for (std::size_t j = 0; j < t; ++j) {
            const double x = values(i, j);
            if (!std::isfinite(x) || x <= 0.0) {
                throw Error("data", "non-positive or non-finite price for asset '" + asset_ids[i] +
                                        "' on " + dates[j]);
            }
        }
    }
}

PricePanel PricePanel::select_assets(const std::vector<std::size_t>& rows) const {
    PricePanel out;
    out.dates = dates;
    out.maturity = maturity;
    out.values = Matrix(rows.size(), dates.size());
    out.asset_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        if (src >= asset_ids.size()) throw Error("data", "asset row index out of range");
        out.asset_ids.push_back(asset_ids[src]);
        for (std::size_t j = 0; j < dates.size(); ++j) out.values(r, j) = values(src, j);
    }
    return out;
}

std::optional<std::size_t> PricePanel::asset_index(const std::string& id) const {
    for (std::size_t i = 0; i < asset_ids.size(); ++i) {
        if (asset_ids[i] == id) return i;
    }
    return std::nullopt;
}

void VariationMatrix::validate() const {
    const std::size_t n = asset_ids.size();
    const std::size_t t = time_indices.size();
    if (n < 1) throw Error("data", "variation matrix has no assets");
    if (t < 2) throw Error("data", "variation matrix needs at least 2 columns");
    if (values.rows() != n || values.cols() != t) {
        throw Error("data", "variation matrix shape mismatch");
    }
    if (scale < 1) throw Error("data", "variation scale must be >= 1");
    for (std::size_t j = 1; j < t; ++j) {
        if (time_indices[j - 1] >= time_indices[j]) {
            throw Error("data", "variation time indices not strictly increasing");
        }
    }
    for (double x : values.data()) {
        if (!std::isfinite(x)) throw Error("data", "non-finite variation value");
    }
}

VariationMatrix VariationMatrix::select_columns(const std::vector<std::size_t>& cols) const {
    VariationMatrix out;
    out.asset_ids = asset_ids;
    out.kind = kind;
    out.scale = scale;
    out.values = Matrix(asset_ids.size(), cols.size());
    out.time_indices.reserve(cols.size());
    for (std::size_t c : cols) {
        if (c >= n_cols()) throw Error("data", "variation column index out of range");
        out.time_indices.push_back(time_indices[c]);
    }
    for (std::size_t i = 0; i < asset_ids.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out.values(i, j) = values(i, cols[j]);
    }
    return out;
}

VariationMatrix VariationMatrix::select_assets(const std::vector<std::size_t>& rows) const {
    VariationMatrix out;
    out.time_indices = time_indices;
    out.kind = kind;
    out.scale = scale;
    out.values = Matrix(rows.size(), n_cols());
    out.asset_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        if (src >= asset_ids.size()) throw Error("data", "asset row index out of range");
        out.asset_ids.push_back(asset_ids[src]);
        for (std::size_t j = 0; j < n_cols(); ++j) out.values(r, j) = values(src, j);
    }
    return out;
}

std::size_t PartialSeries::suffix_start() const {
    const std::size_t t = values.size();
    std::size_t s = t;
    for (std::size_t j = 0; j < t; ++j) {
        if (!std::isnan(values[j])) {
            s = j;
            break;
        }
    }
    for (std::size_t j = s; j < t; ++j) {
        if (std::isnan(values[j])) {
            throw Error("data", "asset '" + asset_id +
                                    "': observed values do not form a suffix (gap at column " +
                                    std::to_string(j) + ")");
        }
    }
    return s;
}

std::vector<std::string> LoadResult::excluded_ids() const {
    std::vector<std::string> ids;
    ids.reserve(excluded.size());
    for (const auto& p : excluded) ids.push_back(p.asset_id);
    return ids;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

LoadResult load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("data", "cannot open file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw Error("data", "empty file '" + path + "'");
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header[0] != "date") {
        throw Error("data", path + ": first header cell must be 'date'");
    }
    const std::size_t n_all = header.size() - 1;
    if (n_all < 2) throw Error("data", path + ": fewer than 2 asset columns");
    std::vector<std::string> ids(header.begin() + 1, header.end());
    for (std::size_t i = 0; i < n_all; ++i) {
        if (ids[i].empty()) throw Error("data", path + ": empty asset id in header");
        for (std::size_t j = 0; j < i; ++j) {
            if (ids[j] == ids[i]) throw Error("data", path + ": duplicate asset id '" + ids[i] + "'");
        }
    }

    std::vector<std::string> dates;
    std::vector<std::vector<double>> cols(n_all);  // per asset, NaN = missing
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != n_all + 1) {
            throw Error("data", path + ": row " + std::to_string(row_no) + " has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(n_all + 1));
        }
        if (!is_valid_iso_date(cells[0])) {
            throw Error("data",
                        path + ": row " + std::to_string(row_no) + ": bad date '" + cells[0] + "'");
        }
        dates.push_back(cells[0]);
        for (std::size_t i = 0; i < n_all; ++i) {
            const std::string& cell = cells[i + 1];
            if (cell.empty()) {
                cols[i].push_back(std::nan(""));
            } else {
                const double x = parse_double(
                    cell, path + ": row " + std::to_string(row_no) + ", column " + ids[i]);
                if (!std::isfinite(x) || x <= 0.0) {
                    throw Error("data", "non-positive price for asset '" + ids[i] + "' on " +
                                            cells[0]);
                }
                cols[i].push_back(x);
            }
        }
    }

    // Sort rows by date; the file may list them in any order.
    const std::size_t t = dates.size();
    std::vector<std::size_t> order(t);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
    for (std::size_t j = 1; j < t; ++j) {
        if (dates[order[j - 1]] == dates[order[j]]) {
            throw Error("data", path + ": duplicate date '" + dates[order[j]] + "'");
        }
    }

    std::vector<std::string> sorted_dates(t);
    for (std::size_t j = 0; j < t; ++j) sorted_dates[j] = dates[order[j]];

    std::vector<std::size_t> complete;
    std::vector<std::size_t> incomplete;
    for (std::size_t i = 0; i < n_all; ++i) {
        const bool has_gap = std::any_of(cols[i].begin(), cols[i].end(),
                                         [](double x) { return std::isnan(x); });
        (has_gap ? incomplete : complete).push_back(i);
    }
    if (complete.size() < 2) {
        throw Error("data", path + ": fewer than 2 assets have complete histories");
    }

    LoadResult out;
    out.panel.asset_ids.reserve(complete.size());
    out.panel.dates = sorted_dates;
    out.panel.values = Matrix(complete.size(), t);
    for (std::size_t r = 0; r < complete.size(); ++r) {
        out.panel.asset_ids.push_back(ids[complete[r]]);
        for (std::size_t j = 0; j < t; ++j) out.panel.values(r, j) = cols[complete[r]][order[j]];
    }
    out.panel.validate();

    for (std::size_t i : incomplete) {
        PartialSeries p;
        p.asset_id = ids[i];
        p.values.resize(t);
        for (std::size_t j = 0; j < t; ++j) p.values[j] = cols[i][order[j]];
        out.excluded.push_back(std::move(p));
    }
    return out;
}

void write_csv(const PricePanel& panel, const std::string& path) {
    panel.validate();
    std::ofstream outf(path);
    if (!outf) throw Error("data", "cannot write file '" + path + "'");
    outf << "date";
    for (const auto& id : panel.asset_ids) outf << ',' << id;
    outf << '\n';
    for (std::size_t j = 0; j < panel.n_dates(); ++j) {
        outf << panel.dates[j];
        for (std::size_t i = 0; i < panel.n_assets(); ++i) {
            outf << ',' << format_double(panel.values(i, j));
        }
        outf << '\n';
    }
    if (!outf) throw Error("data", "write failed for '" + path + "'");
}

VariationMatrix variations(const PricePanel& panel, VariationKind kind, std::size_t scale) {
    panel.validate();
    const std::size_t t = panel.n_dates();
    if (scale < 1) throw Error("data", "variation scale must be >= 1");
    if (scale > t - 1) {
        throw Error("data", "scale " + std::to_string(scale) + " too large for " +
                                std::to_string(t) + " dates");
    }
    const std::size_t t_out = (t - 1) / scale;
    VariationMatrix v;
    v.asset_ids = panel.asset_ids;
    v.kind = kind;
    v.scale = scale;
    v.values = Matrix(panel.n_assets(), t_out);
    v.time_indices.reserve(t_out);
    for (std::size_t j = 0; j < t_out; ++j) v.time_indices.push_back(j * scale + scale);
    for (std::size_t i = 0; i < panel.n_assets(); ++i) {
        for (std::size_t j = 0; j < t_out; ++j) {
            const double a = panel.values(i, j * scale);
            const double b = panel.values(i, j * scale + scale);
            v.values(i, j) = kind == VariationKind::diff ? b - a : std::log(b) - std::log(a);
        }
    }
    v.validate();
    return v;
}

PricePanel prices_from_variations(const VariationMatrix& v, const std::vector<double>& base_levels,
                                  const std::vector<std::string>* dates) {
    v.validate();
    if (v.scale != 1) throw Error("data", "price reconstruction requires scale-1 variations");
    const std::size_t n = v.n_assets();
    const std::size_t t = v.n_cols() + 1;
    if (base_levels.size() != n) {
        throw Error("data", "base level count does not match asset count");
    }
    PricePanel panel;
    panel.asset_ids = v.asset_ids;
    if (dates) {
        if (dates->size() != t) throw Error("data", "date count does not match price columns");
        panel.dates = *dates;
    } else {
        panel.dates = business_days("2006-01-02", t);
    }
    panel.values = Matrix(n, t);
    for (std::size_t i = 0; i < n; ++i) {
        double p = base_levels[i];
        if (!(p > 0.0)) throw Error("data", "base level must be positive");
        panel.values(i, 0) = p;
        for (std::size_t j = 0; j + 1 < t; ++j) {
            p = v.kind == VariationKind::diff ? p + v.values(i, j) : p * std::exp(v.values(i, j));
            panel.values(i, j + 1) = p;
        }
    }
    panel.validate();
    return panel;
}

}  // namespace clustab
