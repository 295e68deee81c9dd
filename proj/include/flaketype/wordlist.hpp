// Copyright 2026 The flaketype Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Built-in copy of data/wordlist.txt: common English nouns used to build
// replacement identifiers and string literals.

#include <string>
#include <vector>

namespace flaketype {

inline const std::vector<std::string>& default_wordlist() {
  static const std::vector<std::string> kWords = {
      "apple", "anchor", "badge", "basket", "beacon", "bridge", "bucket",
      "button", "cabin", "camera", "candle", "canyon", "carpet", "castle",
      "cellar", "channel", "cherry", "circle", "cloud", "comet", "copper",
      "cotton", "county", "cradle", "crystal", "dance", "desert", "diamond",
      "dinner", "dragon", "drawer", "eagle", "engine", "falcon", "feather",
      "fender", "finger", "forest", "fountain", "garden", "garlic", "ginger",
      "glacier", "harbor", "harvest", "hammer", "helmet", "horizon", "island",
      "jacket", "jungle", "kettle", "kitchen", "ladder", "lantern", "ledger",
      "lemon", "letter", "magnet", "mango", "marble", "market", "meadow",
      "mirror", "monkey", "mountain", "needle", "nickel", "noodle", "ocean",
      "olive", "orange", "orchard", "oyster", "paddle", "palace", "panda",
      "parcel", "pebble", "pencil", "pepper", "pillow", "planet", "pocket",
      "poem", "potato", "prairie", "pumpkin", "puzzle", "quarry", "rabbit",
      "radish", "ribbon", "river", "rocket", "saddle", "salmon", "sandal",
      "school", "shadow", "shelter", "signal", "silver", "sketch", "socket",
      "spider", "spring", "squirrel", "stable", "summit", "sunset", "table",
      "tailor", "temple", "thunder", "ticket", "tiger", "timber", "tomato",
      "tower", "trumpet", "tunnel", "turtle", "valley", "velvet", "village",
      "violin", "wagon", "walnut", "window", "winter", "wizard", "yogurt",
      "zebra", "acorn", "album", "arrow", "autumn", "bamboo", "banner",
      "barrel", "beetle", "blanket", "blossom", "border", "bottle", "breeze",
      "bubble", "cactus", "camel", "canvas", "carrot", "cattle", "cedar",
      "chalk", "chimney", "cliff", "clover", "cobalt", "coral", "cousin",
      "cricket", "dolphin", "domino", "donkey", "elbow", "ember", "fabric",
      "fiddle", "flute", "galaxy", "garnet", "goblet", "gravel", "guitar",
      "hazel", "hedge", "honey", "jasmine", "jewel", "kernel", "kitten",
      "lagoon", "lily", "lizard", "locket", "lotus", "maple", "meteor",
      "mitten", "mosaic", "muffin", "nectar", "nugget", "oak", "otter",
      "pastry", "peach", "pearl", "pilot", "pine", "plume", "pony", "quill",
      "raven", "reef", "saffron", "sapphire", "scarf", "sparrow", "spruce",
      "stream", "sugar", "swan", "thistle", "tulip", "umbrella", "vapor",
      "walrus", "willow", "yarn",
  };
  return kWords;
}

}  // namespace flaketype
