#include "bss/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bss/error.hpp"

namespace bss {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw DataError("write failed: " + path.string());
}

void write_csv(const fs::path& path, const Matrix& m, const std::vector<std::string>& labels) {
    if (static_cast<Index>(labels.size()) != m.cols()) {
        throw DimensionError("write_csv: label count differs from column count");
    }
    std::string text;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        if (c) text += ',';
        text += labels[c];
    }
    text += '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) text += ',';
            text += format_double(m(r, c));
        }
        text += '\n';
    }
    write_text(path, text);
}

void write_csv(const fs::path& path, const Matrix& m, const std::string& prefix) {
    std::vector<std::string> labels;
    for (Index c = 0; c < m.cols(); ++c) labels.push_back(prefix + std::to_string(c + 1));
    write_csv(path, m, labels);
}

Matrix read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    auto strip = [](std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    };
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    strip(line);
    const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip(line);
        if (line.empty()) continue;
        std::size_t count = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            double v;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc() || (res.ptr != end && *res.ptr != ',')) {
                throw DataError(path.string() + ": line " + std::to_string(line_no) +
                                ": field " + std::to_string(count + 1) + " is not a number");
            }
            values.push_back(v);
            ++count;
            if (res.ptr == end) break;
            p = res.ptr + 1;
        }
        if (count != cols) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(count) + " fields, header has " + std::to_string(cols));
        }
        ++rows;
    }
    if (rows == 0) throw DataError(path.string() + ": no data rows");
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    std::copy(values.begin(), values.end(), m.data());
    if (!all_finite(m)) throw DataError(path.string() + ": non-finite values");
    return m;
}

void write_series_csv(const fs::path& path, const std::string& index_label,
                      const std::string& value_label, const std::vector<double>& values,
                      std::size_t first) {
    std::string text = index_label + "," + value_label + "\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
        text += std::to_string(first + k) + "," + format_double(values[k]) + "\n";
    }
    write_text(path, text);
}

void write_json(const fs::path& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& why) {
    throw InvalidArgument("config field '" + field + "': " + why);
}

double number_field(const Json& j, const std::string& field) {
    const Json& v = j.at(field);
    if (!v.is_number()) field_error(field, "expected a number");
    return v.get<double>();
}

int int_field(const Json& j, const std::string& field) {
    const Json& v = j.at(field);
    if (!v.is_number_integer()) field_error(field, "expected an integer");
    return v.get<int>();
}

std::pair<double, double> range_field(const Json& j, const std::string& field) {
    const Json& v = j.at(field);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        field_error(field, "expected [min, max]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

ScenarioConfig scenario_config_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("scenario config must be a JSON object");
    static const std::vector<std::string> known = {
        "M",           "N",           "L",
        "snr_db",      "seed",        "min_peaks",
        "max_peaks",   "location_range", "width_range",
        "amplitude_range", "lorentzian_fraction", "rates",
        "t_max"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            field_error(key, "unknown field");
        }
    }
    for (const char* required : {"M", "N", "L", "snr_db"}) {
        if (!j.contains(required)) {
            throw InvalidArgument(std::string("config is missing required field '") + required + "'");
        }
    }
    ScenarioConfig c;
    c.M = int_field(j, "M");
    c.N = int_field(j, "N");
    c.L = int_field(j, "L");
    const Json& snr = j.at("snr_db");
    if (snr.is_string() && (snr.get<std::string>() == "inf" || snr.get<std::string>() == "+inf")) {
        c.snr_db = std::numeric_limits<double>::infinity();
    } else if (snr.is_number()) {
        c.snr_db = snr.get<double>();
    } else {
        field_error("snr_db", "expected a number or \"inf\"");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) field_error("seed", "expected a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("min_peaks")) c.min_peaks = int_field(j, "min_peaks");
    if (j.contains("max_peaks")) c.max_peaks = int_field(j, "max_peaks");
    if (j.contains("location_range")) {
        std::tie(c.location_min, c.location_max) = range_field(j, "location_range");
    }
    if (j.contains("width_range")) std::tie(c.width_min, c.width_max) = range_field(j, "width_range");
    if (j.contains("amplitude_range")) {
        std::tie(c.amplitude_min, c.amplitude_max) = range_field(j, "amplitude_range");
    }
    if (j.contains("lorentzian_fraction")) {
        c.lorentzian_fraction = number_field(j, "lorentzian_fraction");
    }
    if (j.contains("rates")) {
        const Json& r = j.at("rates");
        if (!r.is_array()) field_error("rates", "expected an array of numbers");
        for (const auto& v : r) {
            if (!v.is_number()) field_error("rates", "expected an array of numbers");
            c.rates.push_back(v.get<double>());
        }
    }
    if (j.contains("t_max")) c.t_max = number_field(j, "t_max");
    c.validate();
    return c;
}

Json scenario_config_to_json(const ScenarioConfig& c) {
    Json j;
    j["M"] = c.M;
    j["N"] = c.N;
    j["L"] = c.L;
    if (std::isinf(c.snr_db)) {
        j["snr_db"] = "inf";
    } else {
        j["snr_db"] = c.snr_db;
    }
    j["seed"] = c.seed;
    j["min_peaks"] = c.min_peaks;
    j["max_peaks"] = c.max_peaks;
    j["location_range"] = {c.location_min, c.location_max};
    j["width_range"] = {c.width_min, c.width_max};
    j["amplitude_range"] = {c.amplitude_min, c.amplitude_max};
    j["lorentzian_fraction"] = c.lorentzian_fraction;
    j["rates"] = c.effective_rates();
    j["t_max"] = c.t_max;
    return j;
}

void write_scenario(const fs::path& dir, const Scenario& sc) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
    write_csv(dir / "Y.csv", sc.Y, "b");
    write_csv(dir / "C_true.csv", sc.C, "c");
    write_csv(dir / "S_true.csv", sc.S, "b");

    std::string peaks = "source,kind,location,amplitude,width\n";
    for (std::size_t m = 0; m < sc.peaks.size(); ++m) {
        for (const PeakSpec& p : sc.peaks[m]) {
            peaks += std::to_string(m + 1) + "," +
                     (p.kind == PeakKind::Gaussian ? "gaussian" : "lorentzian") + "," +
                     format_double(p.location) + "," + format_double(p.amplitude) + "," +
                     format_double(p.width) + "\n";
        }
    }
    write_text(dir / "peaks.csv", peaks);

    Json manifest;
    manifest["schema"] = "bss.scenario";
    manifest["version"] = kManifestVersion;
    manifest["config"] = scenario_config_to_json(sc.config);
    manifest["noise_variance"] = sc.sigma2;
    manifest["files"] = {{"Y", "Y.csv"},
                         {"C_true", "C_true.csv"},
                         {"S_true", "S_true.csv"},
                         {"peaks", "peaks.csv"}};
    manifest["streams"] = {{"sources", 0}, {"noise", 1}};
    write_json(dir / "manifest.json", manifest);
}

ScenarioData read_scenario(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("scenario directory not found: " + dir.string());
    ScenarioData d;
    d.Y = read_csv(dir / "Y.csv");
    if (fs::exists(dir / "manifest.json")) {
        d.manifest = read_json(dir / "manifest.json");
        try {
            if (d.manifest.contains("config") && d.manifest["config"].contains("M")) {
                d.M = d.manifest["config"]["M"].get<int>();
            } else if (d.manifest.contains("M")) {
                d.M = d.manifest["M"].get<int>();
            }
        } catch (const Json::exception&) {
            throw DataError(dir.string() + "/manifest.json: field 'M' is not an integer");
        }
    }
    if (fs::exists(dir / "C_true.csv")) d.C_true = read_csv(dir / "C_true.csv");
    if (fs::exists(dir / "S_true.csv")) d.S_true = read_csv(dir / "S_true.csv");
    if (d.C_true && d.C_true->rows() != d.Y.rows()) {
        throw DataError(dir.string() + ": C_true.csv row count differs from Y.csv");
    }
    if (d.S_true && d.S_true->cols() != d.Y.cols()) {
        throw DataError(dir.string() + ": S_true.csv column count differs from Y.csv");
    }
    return d;
}

}  // namespace bss
