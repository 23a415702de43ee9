/* tslint:disable */
/* eslint-disable */

/**
 * Corrected versus plug-in estimates on repeated samples.
 */
export function compare_estimators(k: number, p: string, q: string, alpha: number, n: bigint, trials: number, seed: bigint): string;

/**
 * Empirical failure probability of both estimators against sample size.
 */
export function failure_curve(k: number, p: string, q: string, alpha: number, delta: number, n_min: bigint, n_max: bigint, trials: number, seed: bigint): string;

/**
 * Lower-bound sample counts against alphabet size.
 */
export function lower_bound_scaling(log2_k_min: number, log2_k_max: number, alpha: number, c: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly compare_estimators: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint, h: number, i: bigint) => [number, number];
    readonly failure_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint, i: bigint, j: number, k: bigint) => [number, number];
    readonly lower_bound_scaling: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
