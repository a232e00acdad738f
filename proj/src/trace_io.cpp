#include "bss/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bss/error.hpp"
#include "json.hpp"

namespace bss {

namespace {

using json = nlohmann::json;

json to_json(const Vector& v) {
    json a = json::array();
    for (Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector vector_from(const json& a, Index expected, const char* name, bool optional) {
    if (!a.is_array()) throw DataError(std::string("trace: field '") + name + "' is not an array");
    if (optional && a.empty()) return Vector();
    if (static_cast<Index>(a.size()) != expected) {
        throw DataError(std::string("trace: field '") + name + "' has " +
                        std::to_string(a.size()) + " entries, expected " +
                        std::to_string(expected));
    }
    Vector v(expected);
    for (Index k = 0; k < expected; ++k) v[k] = a[static_cast<std::size_t>(k)].get<double>();
    return v;
}

Matrix matrix_from(const json& a, Index rows, Index cols, const char* name) {
    if (!a.is_array() || static_cast<Index>(a.size()) != rows) {
        throw DataError(std::string("trace: field '") + name + "' has the wrong number of rows");
    }
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = a[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw DataError(std::string("trace: field '") + name + "' row " + std::to_string(r) +
                            " has the wrong length");
        }
        for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

std::vector<int> ints_from(const json& a) {
    std::vector<int> out;
    for (const auto& v : a) out.push_back(v.get<int>());
    return out;
}

}  // namespace

void write_trace(std::ostream& out, const ChainTrace& trace) {
    json header = {{"schema", "bss.trace"},
                   {"version", kTraceVersion},
                   {"N", trace.N},
                   {"M", trace.M},
                   {"L", trace.L},
                   {"prior", to_string(trace.prior)},
                   {"seed", trace.seed},
                   {"stream", trace.stream},
                   {"n_burn_in", trace.n_burn_in},
                   {"n_iterations", trace.size()}};
    out << header.dump() << '\n';
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const SamplerState& s = trace.states[k];
        json rec;
        rec["t"] = s.iteration;
        rec["psi_e"] = s.psi_e;
        rec["sigma2_e"] = to_json(s.sigma2_e);
        rec["C"] = to_json(s.C);
        rec["discard"] = s.discard;
        rec["S"] = to_json(s.S);
        rec["alpha"] = to_json(s.alpha);
        rec["beta"] = to_json(s.beta);
        rec["sigma2_s"] = to_json(s.sigma2_s);
        rec["alpha_step"] = to_json(s.alpha_step);
        if (k < trace.flags.size()) {
            const StepFlags& f = trace.flags[k];
            rec["accept"] = {{"simplex", f.simplex}, {"alpha", f.alpha}, {"sources", f.sources}};
        }
        out << rec.dump() << '\n';
    }
    if (!out) throw DataError("trace: write failed");
}

void write_trace(const std::filesystem::path& path, const ChainTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open trace file for writing: " + path.string());
    write_trace(out, trace);
}

ChainTrace read_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("trace: empty file");
    ChainTrace trace;
    try {
        const json header = json::parse(line);
        if (header.value("schema", "") != "bss.trace") throw DataError("trace: not a trace file");
        if (header.at("version").get<int>() != kTraceVersion) {
            throw DataError("trace: unsupported version " + header.at("version").dump());
        }
        trace.N = header.at("N").get<Index>();
        trace.M = header.at("M").get<Index>();
        trace.L = header.at("L").get<Index>();
        trace.prior = parse_prior_kind(header.at("prior").get<std::string>());
        trace.seed = header.at("seed").get<std::uint64_t>();
        trace.stream = header.at("stream").get<std::uint64_t>();
        trace.n_burn_in = header.at("n_burn_in").get<std::size_t>();
        const auto expected = header.at("n_iterations").get<std::size_t>();

        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const json rec = json::parse(line);
            SamplerState s;
            s.iteration = rec.at("t").get<std::size_t>();
            s.psi_e = rec.at("psi_e").get<double>();
            s.sigma2_e = vector_from(rec.at("sigma2_e"), trace.N, "sigma2_e", false);
            s.C = matrix_from(rec.at("C"), trace.N, trace.M, "C");
            s.discard = ints_from(rec.at("discard"));
            s.S = matrix_from(rec.at("S"), trace.M, trace.L, "S");
            s.alpha = vector_from(rec.at("alpha"), trace.M, "alpha", true);
            s.beta = vector_from(rec.at("beta"), trace.M, "beta", true);
            s.sigma2_s = vector_from(rec.at("sigma2_s"), trace.M, "sigma2_s", true);
            s.alpha_step = vector_from(rec.value("alpha_step", json::array()), trace.M,
                                       "alpha_step", true);
            StepFlags f;
            if (rec.contains("accept")) {
                const json& a = rec.at("accept");
                f.simplex = ints_from(a.at("simplex"));
                f.alpha = ints_from(a.at("alpha"));
                f.sources = ints_from(a.at("sources"));
            }
            trace.states.push_back(std::move(s));
            trace.flags.push_back(std::move(f));
        }
        if (trace.size() != expected) {
            throw DataError("trace: header announces " + std::to_string(expected) +
                            " iterations, file holds " + std::to_string(trace.size()));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("trace: malformed record: ") + e.what());
    }
    return trace;
}

ChainTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open trace file: " + path.string());
    try {
        return read_trace(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace bss
