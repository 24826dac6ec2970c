#include "sarena/sheetspec/workbook.hpp"

namespace sarena::sheet {

// Kept in step with parse_workbook. Colors are loosened to plain strings
// because named colors are accepted.
const std::string& sheetspec_json_schema() {
  static const std::string kSchema = R"JSON({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "SheetSpec@2",
  "type": "object",
  "additionalProperties": false,
  "required": ["version", "sheets"],
  "properties": {
    "version": {"const": "SheetSpec@2"},
    "sheets": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["name", "cells"],
        "properties": {
          "name": {"type": "string", "minLength": 1},
          "cells": {"type": "array", "items": {"$ref": "#/$defs/cell"}},
          "namedRanges": {
            "type": "array",
            "items": {
              "type": "object",
              "additionalProperties": false,
              "required": ["name", "ref"],
              "properties": {"name": {"type": "string"}, "ref": {"type": "string"}}
            }
          },
          "conditionalFormats": {"type": "array", "items": {"$ref": "#/$defs/rule"}}
        }
      }
    },
    "outputs": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["name", "sheet", "ref", "metric"],
        "properties": {
          "name": {"type": "string"},
          "sheet": {"type": "string"},
          "ref": {"type": "string"},
          "metric": {"enum": ["value", "values"]}
        }
      }
    },
    "rules": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "disallowVolatile": {"type": "boolean"},
        "allowedFunctions": {"type": "array", "items": {"type": "string"}}
      }
    }
  },
  "$defs": {
    "color": {"type": "string"},
    "style": {
      "type": "object",
      "properties": {
        "fill": {"$ref": "#/$defs/color"},
        "fontColor": {"$ref": "#/$defs/color"},
        "fontWeight": {"enum": ["normal", "bold"]},
        "fontSize": {"type": "number", "exclusiveMinimum": 0},
        "numberFormat": {"type": "string"},
        "border": {
          "anyOf": [
            {"type": "boolean"},
            {"type": "string"},
            {
              "type": "object",
              "properties": {"style": {"type": "string"}, "color": {"$ref": "#/$defs/color"}}
            }
          ]
        }
      }
    },
    "cell": {
      "type": "object",
      "additionalProperties": false,
      "required": ["ref"],
      "properties": {
        "ref": {"type": "string", "pattern": "^\\$?[A-Za-z]{1,3}\\$?[0-9]+$"},
        "type": {"enum": ["text", "number", "formula"]},
        "text": {"type": "string"},
        "number": {"type": "number"},
        "formula": {"type": "string", "pattern": "^=.+"},
        "style": {"$ref": "#/$defs/style"}
      },
      "oneOf": [
        {"required": ["text"]},
        {"required": ["number"]},
        {"required": ["formula"]}
      ]
    },
    "operand": {"type": ["number", "string"]},
    "anchor": {
      "type": "object",
      "required": ["type"],
      "properties": {
        "type": {"enum": ["min", "max", "number", "percent", "percentile"]},
        "value": {"type": "number"},
        "color": {"$ref": "#/$defs/color"}
      }
    },
    "rule": {
      "oneOf": [
        {
          "type": "object",
          "required": ["type", "range", "operator", "value"],
          "properties": {
            "type": {"const": "cellIs"},
            "range": {"type": "string"},
            "operator": {"enum": ["equal", "notEqual", "greaterThan", "lessThan",
                                  "greaterThanOrEqual", "lessThanOrEqual"]},
            "value": {"$ref": "#/$defs/operand"},
            "style": {"$ref": "#/$defs/style"}
          }
        },
        {
          "type": "object",
          "required": ["type", "range", "min", "max"],
          "properties": {
            "type": {"const": "cellIsBetween"},
            "range": {"type": "string"},
            "operator": {"enum": ["between", "notBetween"]},
            "min": {"$ref": "#/$defs/operand"},
            "max": {"$ref": "#/$defs/operand"},
            "style": {"$ref": "#/$defs/style"}
          }
        },
        {
          "type": "object",
          "required": ["type", "range", "formula"],
          "properties": {
            "type": {"const": "expression"},
            "range": {"type": "string"},
            "formula": {"type": "string"},
            "style": {"$ref": "#/$defs/style"}
          }
        },
        {
          "type": "object",
          "required": ["type", "range", "text"],
          "properties": {
            "type": {"const": "containsText"},
            "range": {"type": "string"},
            "text": {"type": "string"},
            "style": {"$ref": "#/$defs/style"}
          }
        },
        {
          "type": "object",
          "required": ["type", "range", "min", "max"],
          "properties": {
            "type": {"const": "colorScale"},
            "range": {"type": "string"},
            "min": {"$ref": "#/$defs/anchor"},
            "mid": {"$ref": "#/$defs/anchor"},
            "max": {"$ref": "#/$defs/anchor"}
          }
        },
        {
          "type": "object",
          "required": ["type", "range", "color"],
          "properties": {
            "type": {"const": "dataBar"},
            "range": {"type": "string"},
            "color": {"$ref": "#/$defs/color"},
            "min": {"$ref": "#/$defs/anchor"},
            "max": {"$ref": "#/$defs/anchor"}
          }
        }
      ]
    }
  }
})JSON";
  return kSchema;
}

}  // namespace sarena::sheet
