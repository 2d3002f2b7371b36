#include "mmm/io.hpp"

#include "mmm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace mmm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string where(const std::string& source, std::size_t line, std::size_t column, const std::string& name) {
    return source + ": line " + std::to_string(line) + ", column " + std::to_string(column) + " (" + name + ")";
}

template <class T>
bool parse_whole(const std::string& text, T& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

struct PanelRow {
    long week;
    double y;
    std::vector<double> x;
    std::vector<double> z;
};

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& context) {
    if (!obj.is_object()) throw IngestionError(context + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw IngestionError(context + ": unknown key '" + item.key() + "'");
    }
}

double number_at(const Json& obj, const char* key, const std::string& context) {
    const Json& v = obj.at(key);
    if (!v.is_number()) throw IngestionError(context + "." + key + ": expected a number");
    return v.get<double>();
}

int integer_at(const Json& obj, const char* key, const std::string& context) {
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) throw IngestionError(context + "." + key + ": expected an integer");
    return v.get<int>();
}

bool bool_at(const Json& obj, const char* key, const std::string& context) {
    const Json& v = obj.at(key);
    if (!v.is_boolean()) throw IngestionError(context + "." + key + ": expected true or false");
    return v.get<bool>();
}

template <class Prior>
void read_pair(const Json& parent, const char* key, const char* first, const char* second, Prior& prior,
               double Prior::*a, double Prior::*b, const std::string& context) {
    if (!parent.contains(key)) return;
    const std::string ctx = context + "." + key;
    const Json& obj = parent.at(key);
    check_keys(obj, {first, second}, ctx);
    if (obj.contains(first)) prior.*a = number_at(obj, first, ctx);
    if (obj.contains(second)) prior.*b = number_at(obj, second, ctx);
}

std::vector<int> index_list(const Json& v, const std::string& context) {
    if (!v.is_array()) throw IngestionError(context + ": expected an array of 1-based indices");
    std::vector<int> out;
    for (const auto& item : v) {
        if (!item.is_number_integer()) throw IngestionError(context + ": expected integer indices");
        out.push_back(item.get<int>() - 1);
    }
    return out;
}

Json index_json(const std::vector<int>& set) {
    std::vector<int> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    Json arr = Json::array();
    for (int i : sorted) arr.push_back(i + 1);
    return arr;
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw DomainError("format_number: conversion failed");
    return std::string(buf, ptr);
}

PanelDataset parse_panel(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw IngestionError(source + ": empty file, expected a header row");
    if (header.size() < 4 || header[0] != "region" || header[1] != "week" || header[2] != "y")
        throw IngestionError(source + ": line " + std::to_string(line_no) +
                             ": header must start with region,week,y followed by x1..xm,z1..zn");
    int m = 0;
    int n = 0;
    for (std::size_t c = 3; c < header.size(); ++c) {
        const std::string expected_x = "x" + std::to_string(m + 1);
        const std::string expected_z = "z" + std::to_string(n + 1);
        if (n == 0 && header[c] == expected_x) {
            ++m;
        } else if (m > 0 && header[c] == expected_z) {
            ++n;
        } else {
            throw IngestionError(where(source, line_no, c + 1, header[c]) + ": unexpected header, wanted " +
                                 (n == 0 ? expected_x + " or " + expected_z : expected_z));
        }
    }
    if (m == 0) throw IngestionError(source + ": header has no media columns x1..xm");

    std::vector<std::string> order;
    std::map<std::string, std::vector<PanelRow>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw IngestionError(where(source, line_no, fields.size() + 1, header[fields.size()]) + ": missing cell");
        if (fields.size() > header.size())
            throw IngestionError(source + ": line " + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                                 " cells but the header has " + std::to_string(header.size()));
        if (fields[0].empty()) throw IngestionError(where(source, line_no, 1, "region") + ": missing cell");
        PanelRow row;
        if (!parse_whole(fields[1], row.week))
            throw IngestionError(where(source, line_no, 2, "week") + ": '" + fields[1] + "' is not an integer week");
        auto number = [&](std::size_t c) {
            double v = 0.0;
            if (fields[c].empty()) throw IngestionError(where(source, line_no, c + 1, header[c]) + ": missing cell");
            if (!parse_whole(fields[c], v) || !std::isfinite(v))
                throw IngestionError(where(source, line_no, c + 1, header[c]) + ": '" + fields[c] + "' is not a finite number");
            return v;
        };
        row.y = number(2);
        for (int i = 0; i < m; ++i) row.x.push_back(number(3 + static_cast<std::size_t>(i)));
        for (int j = 0; j < n; ++j) row.z.push_back(number(3 + static_cast<std::size_t>(m + j)));
        if (!rows.contains(fields[0])) {
            order.push_back(fields[0]);
        }
        rows[fields[0]].push_back(std::move(row));
    }
    if (order.empty()) throw IngestionError(source + ": no data rows");

    PanelDataset data;
    long reference_first = 0;
    long reference_last = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::string& label = order[r];
        auto& region_rows = rows[label];
        std::stable_sort(region_rows.begin(), region_rows.end(),
                         [](const PanelRow& a, const PanelRow& b) { return a.week < b.week; });
        for (std::size_t q = 1; q < region_rows.size(); ++q) {
            if (region_rows[q].week == region_rows[q - 1].week)
                throw IngestionError(source + ": ragged panel: region " + label + " repeats week " +
                                     std::to_string(region_rows[q].week));
            if (region_rows[q].week != region_rows[q - 1].week + 1)
                throw IngestionError(source + ": ragged panel: region " + label + " is missing week " +
                                     std::to_string(region_rows[q - 1].week + 1));
        }
        const long first = region_rows.front().week;
        const long last = region_rows.back().week;
        if (r == 0) {
            reference_first = first;
            reference_last = last;
        } else if (first != reference_first || last != reference_last) {
            throw IngestionError(source + ": ragged panel: region " + label + " covers weeks " + std::to_string(first) +
                                 ".." + std::to_string(last) + " but region " + order.front() + " covers " +
                                 std::to_string(reference_first) + ".." + std::to_string(reference_last));
        }
        RegionPanel panel;
        panel.label = label;
        const auto w = static_cast<Eigen::Index>(region_rows.size());
        panel.y.resize(w);
        panel.x.resize(w, m);
        panel.z.resize(w, n);
        for (Eigen::Index t = 0; t < w; ++t) {
            const PanelRow& row = region_rows[static_cast<std::size_t>(t)];
            panel.y(t) = row.y;
            for (int i = 0; i < m; ++i) panel.x(t, i) = row.x[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) panel.z(t, j) = row.z[static_cast<std::size_t>(j)];
        }
        data.regions.push_back(std::move(panel));
    }
    data.first_week = static_cast<int>(reference_first);
    try {
        data.validate();
    } catch (const Error& e) {
        throw IngestionError(source + ": " + e.what());
    }
    return data;
}

PanelDataset load_panel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError(path.string() + ": cannot open file");
    return parse_panel(in, path.string());
}

std::string format_panel(const PanelDataset& data) {
    std::ostringstream out;
    out << "region,week,y";
    for (int i = 0; i < data.media_count(); ++i) out << ",x" << i + 1;
    for (int j = 0; j < data.nuisance_count(); ++j) out << ",z" << j + 1;
    out << '\n';
    for (const auto& region : data.regions) {
        for (Eigen::Index t = 0; t < region.y.size(); ++t) {
            out << region.label << ',' << data.first_week + t << ',' << format_number(region.y(t));
            for (Eigen::Index i = 0; i < region.x.cols(); ++i) out << ',' << format_number(region.x(t, i));
            for (Eigen::Index j = 0; j < region.z.cols(); ++j) out << ',' << format_number(region.z(t, j));
            out << '\n';
        }
    }
    return out.str();
}

void save_panel(const PanelDataset& data, const std::filesystem::path& path) {
    write_text(path, format_panel(data));
}

std::string format_draws(const std::vector<std::string>& names, const Eigen::MatrixXd& draws) {
    if (static_cast<Eigen::Index>(names.size()) != draws.cols())
        throw DimensionError("format_draws: " + std::to_string(names.size()) + " names for " +
                             std::to_string(draws.cols()) + " columns");
    std::string out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) out += ',';
        out += names[c];
    }
    out += '\n';
    for (Eigen::Index r = 0; r < draws.rows(); ++r) {
        for (Eigen::Index c = 0; c < draws.cols(); ++c) {
            if (c) out += ',';
            out += format_number(draws(r, c));
        }
        out += '\n';
    }
    return out;
}

std::string format_histogram(const Histogram& histogram) {
    std::string out = "bin,lower,upper,count\n";
    for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
        out += std::to_string(b + 1) + ',' + format_number(histogram.edges[b]) + ',' +
               format_number(histogram.edges[b + 1]) + ',' + std::to_string(histogram.counts[b]) + '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestionError(path.string() + ": cannot open for writing");
    out << content;
    if (!out) throw IngestionError(path.string() + ": write failed");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError(path.string() + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IngestionError(path.string() + ": invalid JSON: " + e.what());
    }
}

Json spec_to_json(const ModelSpec& spec) {
    const PriorConfig& p = spec.priors;
    Json priors = {
        {"alpha_logit", {{"mean", p.alpha_logit.mean}, {"sd", p.alpha_logit.sd}}},
        {"shape", {{"shape", p.shape.shape}, {"rate", p.shape.rate}}},
        {"scale", {{"shape", p.scale.shape}, {"rate", p.scale.rate}}},
        {"constrained_coef", {{"mean", p.constrained_coef.mean}, {"sd", p.constrained_coef.sd}}},
        {"unconstrained_coef", {{"mean", p.unconstrained_coef.mean}, {"sd", p.unconstrained_coef.sd}}},
        {"random_variance_family",
         p.random_variance_family == VariancePriorFamily::TruncatedNormal ? "truncated_normal" : "inverse_gamma"},
        {"random_variance_tn", {{"mean", p.random_variance_tn.mean}, {"sd", p.random_variance_tn.sd}}},
        {"random_variance_ig", {{"shape", p.random_variance_ig.shape}, {"scale", p.random_variance_ig.scale}}},
        {"residual_variance", {{"shape", p.residual_variance.shape}, {"scale", p.residual_variance.scale}}},
        {"literal_random_coef_prior", p.literal_random_coef_prior},
    };
    return Json{
        {"m", spec.m},
        {"n", spec.n},
        {"g", spec.g},
        {"ell", spec.ell},
        {"hierarchical", spec.hierarchical},
        {"sign_constrained_beta", index_json(spec.sign_constrained_beta)},
        {"sign_constrained_gamma", index_json(spec.sign_constrained_gamma)},
        {"log_scale_transforms", spec.log_scale_transforms},
        {"priors", priors},
    };
}

ModelSpec spec_from_json(const Json& json, ModelSpec spec) {
    const std::string ctx = "model";
    check_keys(json, {"m", "n", "g", "ell", "hierarchical", "sign_constrained_beta", "sign_constrained_gamma",
                      "log_scale_transforms", "priors"},
               ctx);
    if (json.contains("m")) spec.m = integer_at(json, "m", ctx);
    if (json.contains("n")) spec.n = integer_at(json, "n", ctx);
    if (json.contains("g")) spec.g = integer_at(json, "g", ctx);
    if (json.contains("ell")) spec.ell = integer_at(json, "ell", ctx);
    if (json.contains("hierarchical")) spec.hierarchical = bool_at(json, "hierarchical", ctx);
    if (json.contains("log_scale_transforms")) spec.log_scale_transforms = bool_at(json, "log_scale_transforms", ctx);
    if (json.contains("sign_constrained_beta"))
        spec.sign_constrained_beta = index_list(json.at("sign_constrained_beta"), ctx + ".sign_constrained_beta");
    if (json.contains("sign_constrained_gamma"))
        spec.sign_constrained_gamma = index_list(json.at("sign_constrained_gamma"), ctx + ".sign_constrained_gamma");
    if (json.contains("priors")) {
        const Json& pj = json.at("priors");
        const std::string pctx = ctx + ".priors";
        check_keys(pj, {"alpha_logit", "shape", "scale", "constrained_coef", "unconstrained_coef",
                        "random_variance_family", "random_variance_tn", "random_variance_ig", "residual_variance",
                        "literal_random_coef_prior"},
                   pctx);
        PriorConfig& p = spec.priors;
        read_pair(pj, "alpha_logit", "mean", "sd", p.alpha_logit, &NormalPrior::mean, &NormalPrior::sd, pctx);
        read_pair(pj, "shape", "shape", "rate", p.shape, &GammaPrior::shape, &GammaPrior::rate, pctx);
        read_pair(pj, "scale", "shape", "rate", p.scale, &GammaPrior::shape, &GammaPrior::rate, pctx);
        read_pair(pj, "constrained_coef", "mean", "sd", p.constrained_coef, &NormalPrior::mean, &NormalPrior::sd, pctx);
        read_pair(pj, "unconstrained_coef", "mean", "sd", p.unconstrained_coef, &NormalPrior::mean, &NormalPrior::sd,
                  pctx);
        read_pair(pj, "random_variance_tn", "mean", "sd", p.random_variance_tn, &NormalPrior::mean, &NormalPrior::sd,
                  pctx);
        read_pair(pj, "random_variance_ig", "shape", "scale", p.random_variance_ig, &InverseGammaPrior::shape,
                  &InverseGammaPrior::scale, pctx);
        read_pair(pj, "residual_variance", "shape", "scale", p.residual_variance, &InverseGammaPrior::shape,
                  &InverseGammaPrior::scale, pctx);
        if (pj.contains("random_variance_family")) {
            const Json& fam = pj.at("random_variance_family");
            if (fam == "truncated_normal") p.random_variance_family = VariancePriorFamily::TruncatedNormal;
            else if (fam == "inverse_gamma") p.random_variance_family = VariancePriorFamily::InverseGamma;
            else throw IngestionError(pctx + ".random_variance_family: expected truncated_normal or inverse_gamma");
        }
        if (pj.contains("literal_random_coef_prior"))
            p.literal_random_coef_prior = bool_at(pj, "literal_random_coef_prior", pctx);
    }
    return spec;
}

Json flat_to_json(const Eigen::VectorXd& flat, const ModelSpec& spec) {
    const auto names = ParameterLayout(spec).names();
    if (static_cast<Eigen::Index>(names.size()) != flat.size())
        throw StructuralError("flat_to_json: vector has " + std::to_string(flat.size()) + " entries, layout has " +
                              std::to_string(names.size()));
    Json out = Json::object();
    for (std::size_t d = 0; d < names.size(); ++d) out[names[d]] = flat(static_cast<Eigen::Index>(d));
    return out;
}

Eigen::VectorXd flat_from_json(const Json& json, const ModelSpec& spec) {
    if (!json.is_object()) throw IngestionError("parameters: expected a JSON object");
    const auto names = ParameterLayout(spec).names();
    Eigen::VectorXd flat(static_cast<Eigen::Index>(names.size()));
    for (std::size_t d = 0; d < names.size(); ++d) {
        if (!json.contains(names[d])) throw IngestionError("parameters: missing '" + names[d] + "'");
        flat(static_cast<Eigen::Index>(d)) = number_at(json, names[d].c_str(), "parameters");
    }
    if (json.size() != names.size()) {
        for (const auto& item : json.items())
            if (std::find(names.begin(), names.end(), item.key()) == names.end())
                throw StructuralError("parameters: unexpected '" + item.key() + "'");
    }
    return flat;
}

}  // namespace mmm
