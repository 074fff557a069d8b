#include "rmstable/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rmstable/errors.hpp"

namespace rms {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width differs from header");
    rows_.push_back(cells);
}

std::string CsvWriter::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, str()); }

void write_batch(const std::filesystem::path& path, const SampleBatch& batch, const nlohmann::json& extra) {
    std::size_t n = batch.dim;
    nlohmann::json h = extra;
    h["format"] = "rmstable-batch";
    h["version"] = 1;
    h["N"] = n;
    h["n"] = batch.size();
    h["stream_key"] = batch.seed;
    h["sampler"] = batch.sampler;
    h["exact"] = batch.exact;
    std::vector<std::string> cols{"draw"};
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            cols.push_back("re_" + std::to_string(a) + "_" + std::to_string(b));
            if (a < b) cols.push_back("im_" + std::to_string(a) + "_" + std::to_string(b));
        }
    CsvWriter w(cols);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        std::vector<std::string> r{std::to_string(i)};
        const auto& m = batch.matrices[i];
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                r.push_back(fmt17(m(a, b).real()));
                if (a < b) r.push_back(fmt17(m(a, b).imag()));
            }
        w.row(r);
    }
    write_text(path, "# " + h.dump() + "\n" + w.str());
}

SampleBatch read_batch(const std::filesystem::path& path, nlohmann::json* header) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(f, line);
    if (line.rfind("# ", 0) != 0) throw std::runtime_error("batch file: missing header line");
    nlohmann::json h = nlohmann::json::parse(line.substr(2));
    if (h.value("format", "") != "rmstable-batch") throw std::runtime_error("batch file: unknown format");
    std::size_t n = h.at("N").get<std::size_t>(), count = h.at("n").get<std::size_t>();
    std::getline(f, line);  // column names
    std::vector<HermitianMatrix> ms;
    ms.reserve(count);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::size_t pos = line.find(',');
        while (pos != std::string::npos) {
            std::size_t next = line.find(',', pos + 1);
            v.push_back(std::strtod(line.substr(pos + 1, next - pos - 1).c_str(), nullptr));
            pos = next;
        }
        if (v.size() != n * n) throw std::runtime_error("batch file: row width mismatch");
        HermitianMatrix m(n);
        std::size_t c = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                double re = v[c++];
                double im = a < b ? v[c++] : 0.0;
                m.set(a, b, {re, im});
            }
        ms.push_back(std::move(m));
    }
    if (ms.size() != count) throw std::runtime_error("batch file: draw count mismatch");
    if (header) *header = h;
    return SampleBatch::from_matrices(n, std::move(ms), h.at("sampler").get<std::string>(),
                                      h.at("stream_key").get<std::uint64_t>(), h.at("exact").get<bool>());
}

}  // namespace rms
