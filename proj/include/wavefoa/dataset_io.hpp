#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavefoa/foa.hpp"
#include "wavefoa/mass.hpp"

namespace wavefoa {

/// One stimulus of a dataset scan: frames plus matched fixation files.
struct StimulusRecord {
    std::string id;
    std::vector<std::filesystem::path> frame_paths;
    std::vector<std::filesystem::path> fixation_files;
    std::optional<std::string> category;
};

/// Load a P2/P5 PGM (maxval 255 or 65535, 16-bit big-endian) and
/// normalise brightness to [0,1]. Timestamp is left at 0.
Frame load_pgm(const std::filesystem::path& path);

/// Min/max range recorded next to a 16-bit saliency PGM.
struct SaliencyScale {
    double min = 0.0;
    double max = 0.0;
};

/// Write a field as 16-bit P5, min-max scaled to 0..65535, plus a
/// "<path>.json" sidecar with the scale. A constant field serialises as
/// all zeros with the constant recorded in the sidecar.
SaliencyScale write_saliency_pgm(const std::filesystem::path& path, const ScalarField& f);

/// Inverse of write_saliency_pgm; exact up to the 1/65535 quantisation.
ScalarField load_saliency_pgm(const std::filesystem::path& path);

/// Scanpath JSON: {stimulus, seed, model, fixations:[{x,y,onset,duration}]}.
void write_scanpath_json(const std::filesystem::path& path, const Scanpath& sp,
                         std::uint64_t seed, const std::string& model);
Scanpath read_scanpath_json(const std::filesystem::path& path,
                            std::uint64_t* seed = nullptr, std::string* model = nullptr);

struct FixationsCsv {
    std::map<std::string, Scanpath> by_subject;
    int clamped = 0; // points moved back inside the grid
};

/// Read `subject,x,y,onset,duration` rows, group by subject, sort each
/// subject's fixations by onset. Out-of-grid points are clamped and
/// counted rather than dropped.
FixationsCsv load_fixations_csv(const std::filesystem::path& path, const Grid& grid);

/// Pair stimuli (*.pgm under stimulus_dir) with <id>.csv fixation files.
/// Records without ground truth keep an empty fixation_files list.
std::vector<StimulusRecord> scan_dataset(const std::filesystem::path& stimulus_dir,
                                         const std::filesystem::path& fixation_dir);

/// Frames of one stimulus: a single PGM file, or every *.pgm in a
/// directory ordered by filename with timestamps i/fps.
std::vector<Frame> load_stimulus_frames(const std::filesystem::path& path, double fps);

} // namespace wavefoa
