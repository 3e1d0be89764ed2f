/* tslint:disable */
/* eslint-disable */

export class EpsilonEstimate {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    epsilon: number;
    mu: number;
    saturated: boolean;
}

export class SimulationSummary {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Mean share of correct guesses; NaN when no repetition guessed.
     */
    readonly accuracy: number;
    readonly mean: number;
    readonly perRepetition: Float64Array;
    readonly std: number;
}

export function epsilonFromTally(m: number, c_prime: number, c: number, gamma: number, delta: number, tau: number): EpsilonEstimate;

/**
 * The seed crosses the boundary as f64 because JS numbers are doubles.
 */
export function simulateAudit(n: number, k: number, eps: number, fraction: number, repetitions: number, seed: number): SimulationSummary;

export function tradeoffCurve(mu: number, tau: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_epsilonestimate_free: (a: number, b: number) => void;
    readonly __wbg_get_epsilonestimate_epsilon: (a: number) => number;
    readonly __wbg_get_epsilonestimate_mu: (a: number) => number;
    readonly __wbg_get_epsilonestimate_saturated: (a: number) => number;
    readonly __wbg_set_epsilonestimate_epsilon: (a: number, b: number) => void;
    readonly __wbg_set_epsilonestimate_mu: (a: number, b: number) => void;
    readonly __wbg_set_epsilonestimate_saturated: (a: number, b: number) => void;
    readonly __wbg_simulationsummary_free: (a: number, b: number) => void;
    readonly epsilonFromTally: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly simulateAudit: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly simulationsummary_accuracy: (a: number) => number;
    readonly simulationsummary_mean: (a: number) => number;
    readonly simulationsummary_perRepetition: (a: number) => [number, number];
    readonly simulationsummary_std: (a: number) => number;
    readonly tradeoffCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
