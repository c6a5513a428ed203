#ifndef EENET_MODEL_IO_HPP
#define EENET_MODEL_IO_HPP

#include <string>

#include "eenet/class_means.hpp"
#include "eenet/internal_classifiers.hpp"
#include "eenet/network.hpp"

namespace eenet {

// Backbone plus whatever internal classifiers have been attached; the unit
// stored in one model file.
struct Model {
    Network network;
    ICBundle ics;
};

// JSON manifest, format_version 1. Doubles are written with 17 significant
// digits so save -> load -> save is byte-identical.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

void save_class_means(const ClassMeansModel& means, const std::string& path);
ClassMeansModel load_class_means(const std::string& path);

} // namespace eenet

#endif
