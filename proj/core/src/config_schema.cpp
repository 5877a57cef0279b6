#include "mpplab/experiment.hpp"

namespace mpplab {

const char* experiment_config_schema() noexcept
{
    return R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "mpplab.config.v1",
  "title": "mpplab experiment config",
  "type": "object",
  "required": ["kind"],
  "additionalProperties": false,
  "properties": {
    "kind": {"enum": ["simulate", "merge", "verify-representation", "verify-orthogonality", "counterexample", "martingale-test"]},
    "model": {"$ref": "#/$defs/model", "description": "single model; merge experiments may use it or 'models'"},
    "models": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/model"},
               "description": "merge components; with more than one entry each must be a leaf model"},
    "horizon": {"type": "number", "exclusiveMinimum": 0, "description": "overrides every model horizon"},
    "replications": {"type": "integer", "minimum": 1, "default": 1,
                     "description": "at least 1000 for verify-orthogonality and counterexample"},
    "seed": {"type": "integer", "minimum": 0, "maximum": 18446744073709551615, "default": 0},
    "tolerance": {"type": "number", "exclusiveMinimum": 0, "default": 1e-6},
    "sigmas": {"type": "number", "exclusiveMinimum": 0, "default": 4},
    "checkpoints": {"type": "integer", "minimum": 1, "default": 5},
    "threads": {"type": "integer", "minimum": 0, "default": 1, "description": "0 uses every hardware thread"},
    "output": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "path": {"type": "string", "default": "", "description": "bare names go to $MPPLAB_OUTPUT_DIR"},
        "format": {"enum": ["json", "csv"], "default": "json"}
      }
    },
    "representation": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "payoff": {"type": "string", "default": "linear",
                   "description": "const:<c> | indicator:<state> | linear | values:<v0>,<v1>,..."},
        "intervals": {"type": "integer", "minimum": 1000, "default": 1000},
        "solver": {"enum": ["uniformization", "poisson-linear"], "default": "uniformization"}
      }
    },
    "orthogonality": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "marks": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        "t": {"type": "number", "minimum": 0, "description": "evaluation time; terminal time T for verify-representation"}
      }
    }
  },
  "$defs": {
    "rates": {"type": "object", "minProperties": 1, "additionalProperties": {"type": "number", "minimum": 0}},
    "leaf": {
      "oneOf": [
        {"type": "object", "required": ["kind", "horizon", "rates"], "additionalProperties": false,
         "properties": {"kind": {"const": "poisson"}, "horizon": {"type": "number"}, "rates": {"$ref": "#/$defs/rates"}}},
        {"type": "object", "required": ["kind", "horizon", "states", "generator"], "additionalProperties": false,
         "properties": {
           "kind": {"const": "ctmc"}, "horizon": {"type": "number"},
           "states": {"type": "array", "items": {"type": "string"}, "minItems": 2},
           "generator": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
           "initial": {"type": "string"},
           "marks": {"type": "array", "items": {"type": "object", "required": ["from", "to", "mark"],
                     "properties": {"from": {"type": "string"}, "to": {"type": "string"}, "mark": {"type": "string"}}}}
         }},
        {"type": "object", "required": ["kind", "rate", "levels", "horizon"], "additionalProperties": false,
         "properties": {"kind": {"const": "poisson_birth"}, "rate": {"type": "number"},
                        "levels": {"type": "integer", "minimum": 1}, "horizon": {"type": "number"}}},
        {"type": "object", "required": ["kind", "horizon", "grid", "probs"], "additionalProperties": false,
         "properties": {
           "kind": {"const": "grid_bernoulli"}, "horizon": {"type": "number"},
           "grid": {"type": "array", "items": {"type": "number"}, "minItems": 1},
           "probs": {"type": "object", "additionalProperties": {
             "oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}}]}}
         }}
      ]
    },
    "model": {
      "oneOf": [
        {"$ref": "#/$defs/leaf"},
        {"type": "object", "required": ["kind", "horizon", "components", "shock"], "additionalProperties": false,
         "properties": {
           "kind": {"const": "common_shock"}, "horizon": {"type": "number"},
           "components": {"type": "array", "minItems": 2, "items": {"$ref": "#/$defs/rates"}},
           "shock": {"type": "object", "required": ["rate", "marks"], "additionalProperties": false,
                     "properties": {"rate": {"type": "number", "minimum": 0},
                                    "components": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                                    "marks": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}}
         }},
        {"type": "object", "required": ["kind", "components"], "additionalProperties": false,
         "properties": {"kind": {"const": "product"}, "components": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/leaf"}}}}
      ]
    }
  }
}
)json";
}

} // namespace mpplab
