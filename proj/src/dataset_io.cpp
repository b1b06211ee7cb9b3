#include "wavefoa/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wavefoa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + path.string());
}

// Whitespace/comment-aware header token scanner that keeps the byte
// offset for error messages.
struct PgmCursor {
    const std::string& data;
    size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < data.size()) {
            const char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::string token() {
        skip_space_and_comments();
        const size_t start = pos;
        while (pos < data.size() &&
               !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#')
            ++pos;
        if (start == pos)
            throw MalformedHeaderError("unexpected end of header at byte " +
                                       std::to_string(start));
        return data.substr(start, pos - start);
    }

    long integer(const char* what) {
        const size_t at = pos;
        const std::string t = token();
        try {
            size_t used = 0;
            const long v = std::stol(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw MalformedHeaderError(std::string("bad ") + what + " '" + t +
                                       "' at byte " + std::to_string(at));
        }
    }
};

} // namespace

Frame load_pgm(const fs::path& path) {
    const std::string data = read_file(path);
    PgmCursor cur{data};

    const std::string magic = cur.token();
    if (magic != "P2" && magic != "P5")
        throw MalformedHeaderError("expected P2 or P5, got '" + magic + "' in " +
                                   path.string());
    const long w = cur.integer("width");
    const long h = cur.integer("height");
    if (w < 1 || h < 1 || w > 1 << 20 || h > 1 << 20)
        throw MalformedHeaderError("implausible dimensions " + std::to_string(w) + "x" +
                                   std::to_string(h));
    const long maxval = cur.integer("maxval");
    if (maxval != 255 && maxval != 65535)
        throw UnsupportedMaxvalError("maxval " + std::to_string(maxval) +
                                     " (only 255 and 65535 are supported)");

    const Grid grid(static_cast<int>(w), static_cast<int>(h));
    ScalarField field(grid, 0.0);
    const double inv_max = 1.0 / static_cast<double>(maxval);
    const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);

    if (magic == "P2") {
        for (size_t i = 0; i < n; ++i) {
            const size_t at = cur.pos;
            cur.skip_space_and_comments();
            if (cur.pos >= data.size())
                throw TruncatedDataError("sample " + std::to_string(i) +
                                         " missing at byte " + std::to_string(at));
            long v = 0;
            try {
                v = cur.integer("sample");
            } catch (const MalformedHeaderError& e) {
                throw TruncatedDataError(e.what());
            }
            if (v < 0 || v > maxval)
                throw MalformedHeaderError("sample " + std::to_string(i) + " value " +
                                           std::to_string(v) + " out of range");
            field.values()[i] = static_cast<double>(v) * inv_max;
        }
    } else {
        // Exactly one whitespace byte separates the maxval from the payload.
        if (cur.pos >= data.size() ||
            !std::isspace(static_cast<unsigned char>(data[cur.pos])))
            throw MalformedHeaderError("missing whitespace before P5 payload");
        size_t at = cur.pos + 1;
        const size_t bytes_per = maxval == 255 ? 1 : 2;
        if (data.size() < at + n * bytes_per)
            throw TruncatedDataError("payload ends at byte " + std::to_string(data.size()) +
                                     ", need " + std::to_string(at + n * bytes_per));
        const auto* raw = reinterpret_cast<const unsigned char*>(data.data()) + at;
        for (size_t i = 0; i < n; ++i) {
            const unsigned v = bytes_per == 1
                                   ? raw[i]
                                   : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            field.values()[i] = static_cast<double>(v) * inv_max;
        }
    }
    return Frame{std::move(field), 0.0};
}

namespace {

SaliencyScale write_scale_sidecar(const fs::path& path, SaliencyScale scale) {
    json j;
    j["min"] = scale.min;
    j["max"] = scale.max;
    write_file(fs::path(path.string() + ".json"), j.dump(2) + "\n");
    return scale;
}

} // namespace

SaliencyScale write_saliency_pgm(const fs::path& path, const ScalarField& f) {
    const double lo = f.min();
    const double hi = f.max();
    const double range = hi - lo;

    std::string out;
    out += "P5\n" + std::to_string(f.width()) + " " + std::to_string(f.height()) +
           "\n65535\n";
    out.reserve(out.size() + f.values().size() * 2);
    for (double v : f.values()) {
        // Constant fields serialise as all zeros; the sidecar keeps the level.
        const double unit = range > 0.0 ? (v - lo) / range : 0.0;
        const auto q = static_cast<std::uint16_t>(std::lround(unit * 65535.0));
        out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xff));
    }
    write_file(path, out);
    return write_scale_sidecar(path, SaliencyScale{lo, hi});
}

ScalarField load_saliency_pgm(const fs::path& path) {
    Frame frame = load_pgm(path);
    const fs::path sidecar(path.string() + ".json");
    json j;
    try {
        j = json::parse(read_file(sidecar));
    } catch (const json::exception& e) {
        throw IoError("bad saliency sidecar " + sidecar.string() + ": " + e.what());
    }
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    for (double& v : frame.brightness.values()) v = lo + v * (hi - lo);
    return std::move(frame.brightness);
}

void write_scanpath_json(const fs::path& path, const Scanpath& sp, std::uint64_t seed,
                         const std::string& model) {
    json j;
    j["stimulus"] = sp.stimulus_id;
    j["seed"] = seed;
    j["model"] = model;
    json fixations = json::array();
    for (const Fixation& f : sp.fixations) {
        fixations.push_back(
            {{"x", f.x}, {"y", f.y}, {"onset", f.onset}, {"duration", f.duration}});
    }
    j["fixations"] = std::move(fixations);
    write_file(path, j.dump(2) + "\n");
}

Scanpath read_scanpath_json(const fs::path& path, std::uint64_t* seed, std::string* model) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw IoError("bad scanpath json " + path.string() + ": " + e.what());
    }
    Scanpath sp;
    try {
        sp.stimulus_id = j.at("stimulus").get<std::string>();
        if (seed) *seed = j.at("seed").get<std::uint64_t>();
        if (model) *model = j.at("model").get<std::string>();
        for (const json& f : j.at("fixations")) {
            sp.fixations.push_back({f.at("x").get<double>(), f.at("y").get<double>(),
                                    f.at("onset").get<double>(),
                                    f.at("duration").get<double>()});
        }
    } catch (const json::exception& e) {
        throw IoError("bad scanpath json " + path.string() + ": " + e.what());
    }
    return sp;
}

FixationsCsv load_fixations_csv(const fs::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            // trim surrounding blanks
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? std::string()
                                                 : cell.substr(b, e - b + 1));
        }
        return out;
    };

    std::string header_line;
    if (!std::getline(in, header_line))
        throw MissingColumnError("empty file " + path.string());
    const std::vector<std::string> header = split(header_line);
    const std::vector<std::string> required = {"subject", "x", "y", "onset", "duration"};
    std::vector<size_t> col(required.size());
    for (size_t i = 0; i < required.size(); ++i) {
        const auto it = std::find(header.begin(), header.end(), required[i]);
        if (it == header.end())
            throw MissingColumnError("column '" + required[i] + "' missing in " +
                                     path.string());
        col[i] = static_cast<size_t>(it - header.begin());
    }

    FixationsCsv result;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split(line);
        auto fail = [&](const std::string& why) {
            throw UnparsableRowError("row " + std::to_string(row) + ": " + why);
        };
        if (cells.size() < header.size()) fail("expected " + std::to_string(header.size()) +
                                               " columns, got " + std::to_string(cells.size()));
        double x = 0, y = 0, onset = 0, duration = 0;
        try {
            size_t used = 0;
            x = std::stod(cells[col[1]], &used);
            if (used != cells[col[1]].size()) fail("bad x '" + cells[col[1]] + "'");
            y = std::stod(cells[col[2]], &used);
            if (used != cells[col[2]].size()) fail("bad y '" + cells[col[2]] + "'");
            onset = std::stod(cells[col[3]], &used);
            if (used != cells[col[3]].size()) fail("bad onset '" + cells[col[3]] + "'");
            duration = std::stod(cells[col[4]], &used);
            if (used != cells[col[4]].size())
                fail("bad duration '" + cells[col[4]] + "'");
        } catch (const UnparsableRowError&) {
            throw;
        } catch (const std::exception&) {
            fail("unparsable number");
        }
        if (duration <= 0.0) fail("duration must be > 0");

        const double cx = std::clamp(x, 0.0, static_cast<double>(grid.width - 1));
        const double cy = std::clamp(y, 0.0, static_cast<double>(grid.height - 1));
        if (cx != x || cy != y) ++result.clamped;

        Scanpath& sp = result.by_subject[cells[col[0]]];
        sp.stimulus_id = path.stem().string();
        sp.fixations.push_back({cx, cy, onset, duration});
    }
    for (auto& [subject, sp] : result.by_subject) {
        (void)subject;
        std::stable_sort(sp.fixations.begin(), sp.fixations.end(),
                         [](const Fixation& a, const Fixation& b) { return a.onset < b.onset; });
    }
    return result;
}

std::vector<StimulusRecord> scan_dataset(const fs::path& stimulus_dir,
                                         const fs::path& fixation_dir) {
    if (!fs::is_directory(stimulus_dir))
        throw IoError("stimulus directory " + stimulus_dir.string() + " not found");
    std::vector<StimulusRecord> records;
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(stimulus_dir)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());

    for (const fs::path& p : entries) {
        StimulusRecord rec;
        if (fs::is_regular_file(p) && p.extension() == ".pgm") {
            rec.id = p.stem().string();
            rec.frame_paths.push_back(p);
        } else if (fs::is_directory(p)) {
            std::vector<fs::path> frames;
            for (const auto& f : fs::directory_iterator(p))
                if (f.path().extension() == ".pgm") frames.push_back(f.path());
            if (frames.empty()) continue;
            std::sort(frames.begin(), frames.end());
            rec.id = p.filename().string();
            rec.frame_paths = std::move(frames);
        } else {
            continue;
        }
        const fs::path fix = fixation_dir / (rec.id + ".csv");
        if (fs::is_regular_file(fix)) rec.fixation_files.push_back(fix);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<Frame> load_stimulus_frames(const fs::path& path, double fps) {
    if (fps <= 0.0) throw ConfigError("fps must be > 0");
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path))
            if (e.path().extension() == ".pgm") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw IoError("no .pgm frames in " + path.string());
    } else {
        files.push_back(path);
    }
    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (size_t i = 0; i < files.size(); ++i) {
        Frame f = load_pgm(files[i]);
        f.timestamp = static_cast<double>(i) / fps;
        frames.push_back(std::move(f));
    }
    return frames;
}

} // namespace wavefoa
