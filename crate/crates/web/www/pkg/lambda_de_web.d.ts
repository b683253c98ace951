/* tslint:disable */
/* eslint-disable */

/**
 * Field shapes and populations of one DE pulse started in |+1>.
 */
export function dynamics(area_pi: number, omega_e_tp: number, detuning_tp: number, phase: number, samples: number): string;

/**
 * Pi-pulse infidelity at fixed area versus omega_e (DE) or Delta (AE).
 */
export function infidelity_row(scheme: string, area_pi: number, freq_min: number, freq_max: number, points: number): string;

/**
 * Ramsey fringe with its contrast-normalized copy.
 */
export function ramsey_fringe(scheme: string, area_pi: number, detuning_tp: number, omega_e_tp: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dynamics: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly infidelity_row: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly ramsey_fringe: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
