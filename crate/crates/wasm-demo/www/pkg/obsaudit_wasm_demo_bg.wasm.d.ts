/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_epsilonestimate_free: (a: number, b: number) => void;
export const __wbg_get_epsilonestimate_epsilon: (a: number) => number;
export const __wbg_get_epsilonestimate_mu: (a: number) => number;
export const __wbg_get_epsilonestimate_saturated: (a: number) => number;
export const __wbg_set_epsilonestimate_epsilon: (a: number, b: number) => void;
export const __wbg_set_epsilonestimate_mu: (a: number, b: number) => void;
export const __wbg_set_epsilonestimate_saturated: (a: number, b: number) => void;
export const __wbg_simulationsummary_free: (a: number, b: number) => void;
export const epsilonFromTally: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const simulateAudit: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const simulationsummary_accuracy: (a: number) => number;
export const simulationsummary_mean: (a: number) => number;
export const simulationsummary_perRepetition: (a: number) => [number, number];
export const simulationsummary_std: (a: number) => number;
export const tradeoffCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
