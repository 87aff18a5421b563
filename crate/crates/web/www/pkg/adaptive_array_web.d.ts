/* tslint:disable */
/* eslint-disable */

export class RoomResponse {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Meters; NaN for an anechoic room.
     */
    readonly criticalDistance: number;
    /**
     * Seconds; NaN for an anechoic room.
     */
    readonly measuredT60: number;
    /**
     * Impulse response samples at 16 kHz.
     */
    readonly samples: Float64Array;
}

export class Separation {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    inputSir: number;
    msc: number;
    outputSir: number;
}

/**
 * Competitor spacings around `d_sup` for `a = 1..=a_max(d_sup, epsilon)`.
 */
export function competitorSequence(d_sup: number, epsilon: number): Float64Array;

/**
 * Response of the 4.5 x 4.5 x 2.5 m room from a source at `angle_deg` and
 * `distance` meters to the center microphone of the array.
 */
export function roomResponse(t60: number, angle_deg: number, distance: number): RoomResponse;

/**
 * Adapts one sub-array of `spacing` meters for `seconds` on two speech-like
 * sources at `+-angle_deg`, 1 m away, and reports the coherence measure and
 * SIR before and after separation.
 */
export function separate(angle_deg: number, t60: number, spacing: number, seconds: number, seed: bigint): Separation;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_separation_inputSir: (a: number) => number;
    readonly __wbg_get_separation_msc: (a: number) => number;
    readonly __wbg_get_separation_outputSir: (a: number) => number;
    readonly __wbg_roomresponse_free: (a: number, b: number) => void;
    readonly __wbg_separation_free: (a: number, b: number) => void;
    readonly __wbg_set_separation_inputSir: (a: number, b: number) => void;
    readonly __wbg_set_separation_msc: (a: number, b: number) => void;
    readonly __wbg_set_separation_outputSir: (a: number, b: number) => void;
    readonly competitorSequence: (a: number, b: number) => [number, number, number, number];
    readonly roomResponse: (a: number, b: number, c: number) => [number, number, number];
    readonly roomresponse_criticalDistance: (a: number) => number;
    readonly roomresponse_measuredT60: (a: number) => number;
    readonly roomresponse_samples: (a: number) => [number, number];
    readonly separate: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
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
